"""Short-time Fourier transform, dB scaling and micro-Doppler metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .channel import BasebandSignal


class DspError(ValueError):
    pass


@dataclass(frozen=True)
class WindowSpec:
    duration: float = 0.3
    shape: str = "hann"
    hop: float = 0.025
    fft_size: int | None = None   # None -> next pow2 >= 4 * window length

    def __post_init__(self):
        if self.shape not in ("hann", "hamming", "rect"):
            raise DspError(f"unknown window shape {self.shape!r}")
        if not 0 < self.hop <= self.duration:
            raise DspError("hop must satisfy 0 < hop <= window duration")

    def length(self, fs: float) -> int:
        n = int(round(self.duration * fs))
        if n < 8:
            raise DspError("window shorter than 8 samples")
        return n

    def nfft(self, fs: float) -> int:
        n = self.length(fs)
        if self.fft_size is not None:
            if self.fft_size < n:
                raise DspError("fft_size shorter than window")
            return int(self.fft_size)
        return 1 << int(math.ceil(math.log2(4 * n)))

    def taper(self, n: int) -> np.ndarray:
        if self.shape == "rect":
            return np.ones(n)
        # periodic-free symmetric windows
        k = np.arange(n)
        a = 0.5 if self.shape == "hann" else 0.54
        return a - (1 - a) * np.cos(2 * np.pi * k / (n - 1))


@dataclass
class Spectrogram:
    times: np.ndarray
    freqs: np.ndarray
    mag: np.ndarray            # (n_freqs, n_frames)
    scale: str = "linear"      # or "db"
    fs: float = 0.0
    window: WindowSpec | None = None

    def __post_init__(self):
        if self.mag.shape != (len(self.freqs), len(self.times)):
            raise DspError("spectrogram dimensions inconsistent")

    @property
    def df(self) -> float:
        return float(self.freqs[1] - self.freqs[0])

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t\\f," + ",".join(f"{f:.9g}" for f in self.freqs) + "\n")
            for j, t in enumerate(self.times):
                fh.write(f"{t:.9g}," + ",".join(f"{v:.9g}" for v in self.mag[:, j]) + "\n")

    @classmethod
    def from_csv(cls, path, scale: str = "db") -> "Spectrogram":
        raw = np.genfromtxt(path, delimiter=",", skip_header=0, dtype=float)
        raw = np.atleast_2d(raw)
        freqs = raw[0, 1:]
        times = raw[1:, 0]
        return cls(times, freqs, raw[1:, 1:].T, scale)

    def to_pgm(self, path, dynamic_range: float) -> None:
        Path(path).write_bytes(pgm_bytes(self, dynamic_range))


def stft(x: BasebandSignal, w: WindowSpec | None = None) -> Spectrogram:
    """|STFT|^2 with a two-sided frequency axis over (-fs/2, fs/2]."""
    w = w or WindowSpec()
    fs = x.fs
    n = w.length(fs)
    nfft = w.nfft(fs)
    sig = np.asarray(x.samples, dtype=complex)
    if len(sig) < n or len(sig) == 0:
        raise DspError("signal shorter than the analysis window")
    starts = []
    k = 0
    while True:
        s = int(round(k * w.hop * fs))
        if s + n > len(sig):
            break
        starts.append(s)
        k += 1
    win = w.taper(n)
    frames = np.stack([sig[s:s + n] * win for s in starts], axis=1)
    spec = np.fft.fft(frames, n=nfft, axis=0) / math.sqrt(n)
    raw_f = np.fft.fftfreq(nfft, d=1.0 / fs)
    raw_f = np.where(raw_f <= -fs / 2 + 1e-12 * fs, raw_f + fs, raw_f)
    order = np.argsort(raw_f)
    times = x.t0 + w.duration / 2 + np.arange(len(starts)) * w.hop
    return Spectrogram(times, raw_f[order], np.abs(spec[order]) ** 2, "linear", fs, w)


def to_db(s: Spectrogram, dynamic_range: float = 60.0) -> Spectrogram:
    if s.scale != "linear":
        raise DspError("to_db expects a linear spectrogram")
    peak = float(np.max(s.mag))
    if peak <= 0:
        raise DspError("spectrogram is identically zero")
    with np.errstate(divide="ignore"):
        db = 10 * np.log10(s.mag / peak)
    return replace(s, mag=np.maximum(db, -float(dynamic_range)), scale="db")


def _band_mask(freqs, f_lo, f_hi, exclude_dc_halfwidth):
    a = np.abs(freqs)
    return (a >= f_lo) & (a <= f_hi) & (a >= exclude_dc_halfwidth)


def doppler_band_power(s: Spectrogram, f_lo: float, f_hi: float,
                       exclude_dc_halfwidth: float = 10.0) -> float:
    """Frame-averaged linear power over |f| in [f_lo, f_hi], DC region excluded."""
    if s.scale != "linear":
        raise DspError("band power needs a linear spectrogram")
    if not f_lo < f_hi:
        raise DspError("band needs f_lo < f_hi")
    m = _band_mask(s.freqs, f_lo, f_hi, exclude_dc_halfwidth)
    if not m.any():
        raise DspError("Doppler band is empty")
    return float(s.mag[m].sum(axis=0).mean())


def peak_doppler_track(s: Spectrogram, threshold_db: float = -40.0,
                       exclude_dc_halfwidth: float = 10.0) -> list[tuple[float, float | None]]:
    if s.scale != "db":
        raise DspError("peak track expects a dB spectrogram")
    m = np.abs(s.freqs) >= exclude_dc_halfwidth
    idx = np.flatnonzero(m)
    sub = s.mag[idx]
    best = np.argmax(sub, axis=0)
    out = []
    for j, t in enumerate(s.times):
        v = sub[best[j], j]
        out.append((float(t), float(s.freqs[idx[best[j]]]) if v > threshold_db else None))
    return out


def pgm_bytes(s: Spectrogram, dynamic_range: float) -> bytes:
    """8-bit binary PGM; rows run from highest to lowest frequency."""
    if s.scale != "db":
        raise DspError("PGM export expects a dB spectrogram")
    r = float(dynamic_range)
    v = np.clip(s.mag, -r, 0.0)
    pix = np.floor(255.0 * (v + r) / r + 0.5).astype(np.uint8)[::-1]
    h, w = pix.shape
    return f"P5\n{w} {h}\n255\n".encode() + pix.tobytes()


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise DspError("not a binary PGM")
    w, h = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w)
