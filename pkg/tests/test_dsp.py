import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corner_ris_sim.channel import BasebandSignal
from corner_ris_sim.dsp import (
    DspError, Spectrogram, WindowSpec, doppler_band_power, peak_doppler_track, pgm_bytes,
    read_pgm, stft, to_db,
)

ORACLE = json.loads((Path(__file__).parent / "fixtures" / "oracles.json").read_text())
FS = 370.0


def tone(f, n=1110, amp=1.0, fs=FS):
    return BasebandSignal(amp * np.exp(2j * np.pi * f * np.arange(n) / fs), fs)


def test_axis_and_frame_layout():
    s = stft(tone(0.0))
    assert s.freqs[0] > -FS / 2 and s.freqs[-1] == pytest.approx(FS / 2)
    assert np.all(np.diff(s.freqs) > 0)
    assert s.df == pytest.approx(FS / 512)
    assert s.times[0] == pytest.approx(0.15)
    assert np.allclose(np.diff(s.times), 0.025)


@pytest.mark.parametrize("f", [55.0, -30.0, 120.0])
def test_tone_ridge(f):
    s = stft(tone(f))
    peaks = s.freqs[np.argmax(s.mag, axis=0)]
    assert np.all(np.abs(peaks - f) <= s.df)


def test_positive_frequency_maps_positive():
    s = stft(tone(40.0))
    assert s.freqs[np.argmax(s.mag[:, 0])] > 0


def test_dc_only():
    s = stft(tone(0.0))
    i0 = int(np.argmin(np.abs(s.freqs)))
    assert np.all(np.argmax(s.mag, axis=0) == i0)
    near = np.abs(s.freqs) < 2 / 0.3        # Hann main lobe
    assert s.mag[near].sum() / s.mag.sum() > 0.999


def _n_peaks(col):
    db = 10 * np.log10(col / col.max())
    inner = (col[1:-1] > col[:-2]) & (col[1:-1] > col[2:]) & (db[1:-1] > -6)
    return int(inner.sum())


def test_two_tone_resolution():
    n = 1110
    t = np.arange(n) / FS
    far = BasebandSignal(np.exp(2j * np.pi * 50 * t) + np.exp(2j * np.pi * 60 * t), FS)
    near = BasebandSignal(np.exp(2j * np.pi * 50 * t) + np.exp(2j * np.pi * 53 * t), FS)
    assert _n_peaks(stft(far).mag[:, 10]) == 2
    assert _n_peaks(stft(near).mag[:, 10]) == 1


def test_to_db_examples():
    mag = np.array([[1.0, 0.1, 1e-9]]).T
    s = Spectrogram(np.array([0.0]), np.array([-1.0, 0.0, 1.0]), mag)
    d = to_db(s, 40)
    assert d.mag[:, 0] == pytest.approx([0.0, -10.0, -40.0])
    with pytest.raises(DspError):
        to_db(Spectrogram(np.array([0.0]), np.array([0.0]), np.zeros((1, 1))))
    with pytest.raises(DspError):
        to_db(d)


def test_band_power_captures_tone():
    s = stft(tone(55.0))
    total = s.mag.sum(axis=0).mean()
    assert doppler_band_power(s, 10, 100, 5) / total > 0.999


def test_band_power_errors():
    s = stft(tone(55.0))
    with pytest.raises(DspError):
        doppler_band_power(s, 1, 4, 5)
    with pytest.raises(DspError):
        doppler_band_power(s, 20, 10)


def test_noise_band_power_expectation():
    n0 = 1e-9
    lo, hi, dc = 10.0, 185.0, 10.0
    vals = []
    for seed in range(100):
        rng = np.random.default_rng(seed)
        w = math.sqrt(n0 / 2) * (rng.standard_normal(1110) + 1j * rng.standard_normal(1110))
        vals.append(doppler_band_power(stft(BasebandSignal(w, FS)), lo, hi, dc))
    f = stft(tone(0.0)).freqs
    bins = np.count_nonzero((np.abs(f) >= max(lo, dc)) & (np.abs(f) <= hi))
    expect = n0 * ORACLE["hann111_mean_w2"] * bins
    assert abs(10 * math.log10(np.mean(vals) / expect)) < 3.0
    # the estimate is unbiased, so it should in fact be much closer than 3 dB
    assert np.mean(vals) == pytest.approx(expect, rel=0.05)


def test_peak_track():
    d = to_db(stft(tone(-30.0)))
    track = peak_doppler_track(d, -40)
    assert all(f == pytest.approx(-30.0, abs=d.df) for _, f in track)
    rng = np.random.default_rng(0)
    x = np.zeros(1110, complex)
    x[:555] = np.exp(2j * np.pi * 60 * np.arange(555) / FS)
    x += 1e-6 * (rng.standard_normal(1110) + 1j * rng.standard_normal(1110))
    tr = peak_doppler_track(to_db(stft(BasebandSignal(x, FS)), 60), -40)
    assert tr[0][1] is not None and tr[-1][1] is None
    with pytest.raises(DspError):
        peak_doppler_track(stft(tone(5.0)))


@settings(max_examples=20, deadline=None)
@given(st.integers(16, 120), st.integers(0, 2 ** 32 - 1))
def test_parseval_rect(n_win, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(1000) + 1j * rng.standard_normal(1000)
    w = WindowSpec(duration=n_win / FS, shape="rect", hop=n_win / FS)
    s = stft(BasebandSignal(x, FS), w)
    used = len(s.times) * n_win
    energy = np.sum(np.abs(x[:used]) ** 2)
    assert s.mag.sum() == pytest.approx(energy * w.nfft(FS) / n_win, rel=1e-6)


def test_shift_covariance():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(1110) + 1j * rng.standard_normal(1110)
    hop = 10
    w = WindowSpec(hop=hop / FS)
    a = stft(BasebandSignal(x, FS), w).mag
    b = stft(BasebandSignal(np.concatenate([np.zeros(hop), x]), FS), w).mag
    assert np.array_equal(b[:, 1:a.shape[1]], a[:, :a.shape[1] - 1])


def test_determinism():
    x = tone(33.3)
    assert np.array_equal(stft(x).mag, stft(x).mag)


def test_window_validation():
    with pytest.raises(DspError):
        WindowSpec(hop=0.5)
    with pytest.raises(DspError):
        WindowSpec(shape="kaiser")
    with pytest.raises(DspError):
        stft(tone(1.0, n=50))
    with pytest.raises(DspError):
        WindowSpec(fft_size=64).nfft(FS)


def test_pgm_mapping(tmp_path):
    mag = np.array([[0.0, -30.0], [-60.0, -15.0], [-59.9, -0.2]])
    s = Spectrogram(np.array([0.1, 0.2]), np.array([-1.0, 0.0, 1.0]), mag, "db")
    s.to_pgm(tmp_path / "s.pgm", 60)
    pix = read_pgm(tmp_path / "s.pgm")
    # rows run from the highest frequency down
    expect = np.floor(255 * (mag[::-1] + 60) / 60 + 0.5)
    assert np.array_equal(pix, expect.astype(np.uint8))
    assert pix[2, 0] == 255 and pix[1, 0] == 0
    assert pgm_bytes(s, 60).startswith(b"P5\n2 3\n255\n")


def test_spectrogram_csv(tmp_path):
    d = to_db(stft(tone(20.0)))
    d.to_csv(tmp_path / "s.csv")
    e = Spectrogram.from_csv(tmp_path / "s.csv")
    assert np.allclose(e.freqs, d.freqs) and np.allclose(e.times, d.times)
    assert np.allclose(e.mag, d.mag, rtol=1e-8, atol=1e-8)
