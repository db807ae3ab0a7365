"""One-bit coded reflecting surface: phase synthesis, quantisation and far-field pattern."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

C0 = 299_792_458.0


class RisError(ValueError):
    pass


@dataclass(frozen=True)
class RisPanel:
    n_cols: int = 16           # steering axis
    n_rows: int = 10
    period: float = 0.016      # m
    freq_design: float = 5.45e9
    phase_on: float = math.pi
    phase_off: float = 0.0
    phase_error: float = 0.0   # half-width of the uniform per-cell phase spread, rad
    cell_amplitude: float = 1.0
    element_exponent: float = 1.0
    error_seed: int = 0

    def __post_init__(self):
        if self.n_cols < 1 or self.n_rows < 1:
            raise RisError("panel needs at least one cell")
        if self.period <= 0:
            raise RisError("cell period must be positive")
        if not 0 < self.cell_amplitude <= 1:
            raise RisError("cell amplitude must be in (0, 1]")
        if self.phase_error < 0:
            raise RisError("phase error must be non-negative")

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_cols, self.n_rows

    @property
    def x(self) -> np.ndarray:
        """Cell centre coordinates along the steering axis, m."""
        return (np.arange(self.n_cols) - (self.n_cols - 1) / 2) * self.period

    @property
    def aperture(self) -> float:
        return self.n_cols * self.period

    def state_difference_ok(self, tol_deg: float = 20.0) -> bool:
        diff = abs(wrap_phase(self.phase_on - self.phase_off))
        return abs(diff - math.pi) <= math.radians(tol_deg) + 1e-12

    def error_draw(self) -> np.ndarray:
        if self.phase_error == 0:
            return np.zeros(self.shape)
        rng = np.random.default_rng(self.error_seed)
        return rng.uniform(-self.phase_error, self.phase_error, size=self.shape)


def wrap_phase(phi):
    """Wrap to [-pi, pi)."""
    return (np.asarray(phi) + np.pi) % (2 * np.pi) - np.pi


@dataclass(frozen=True)
class PhaseProfile:
    values: np.ndarray   # (n_cols, n_rows), rad

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise RisError("phase profile has non-finite entries")


@dataclass(frozen=True)
class CodingMap:
    bits: np.ndarray     # (n_cols, n_rows) of {0, 1}

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.ndim != 2 or not np.isin(b, (0, 1)).all():
            raise RisError("coding map must be a 2-D array of 0/1")
        object.__setattr__(self, "bits", b.astype(np.uint8))

    @classmethod
    def uniform(cls, panel: RisPanel, bit: int = 0) -> "CodingMap":
        return cls(np.full(panel.shape, bit, dtype=np.uint8))

    def to_text(self) -> str:
        # one line per physical row, one character per column
        return "\n".join("".join(str(int(b)) for b in self.bits[:, n])
                         for n in range(self.bits.shape[1])) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CodingMap":
        rows = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not rows or len({len(r) for r in rows}) != 1 or set("".join(rows)) - {"0", "1"}:
            raise RisError("coding text must be equal-length lines of 0/1")
        return cls(np.array([[int(c) for c in r] for r in rows], dtype=np.uint8).T)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "CodingMap":
        return cls.from_text(Path(path).read_text())


@dataclass(frozen=True)
class Pattern:
    angles: np.ndarray   # deg, strictly increasing over [-90, 90]
    gain: np.ndarray     # complex

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        if a.ndim != 1 or len(a) != len(self.gain) or np.any(np.diff(a) <= 0):
            raise RisError("pattern angle grid must be strictly increasing")

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.gain)


def _check_angle(name, a):
    if not abs(a) < 90:
        raise RisError(f"{name} = {a} deg: angle out of range (|angle| must be < 90)")


def continuous_phase_profile(panel: RisPanel, theta_i: float, theta_r: float,
                             freq: float | None = None) -> PhaseProfile:
    """Linear phase gradient that turns incidence theta_i into reflection theta_r."""
    _check_angle("theta_i", theta_i)
    _check_angle("theta_r", theta_r)
    k = 2 * np.pi * (freq or panel.freq_design) / C0
    s = math.sin(math.radians(theta_r)) + math.sin(math.radians(theta_i))
    col = wrap_phase(-k * panel.x * s)
    return PhaseProfile(np.repeat(col[:, None], panel.n_rows, axis=1))


def quantize_1bit(profile: PhaseProfile, panel: RisPanel) -> CodingMap:
    v = np.asarray(profile.values)
    if v.shape != panel.shape:
        raise RisError(f"profile shape {v.shape} does not match panel {panel.shape}")
    d_off = np.abs(wrap_phase(v - panel.phase_off))
    d_on = np.abs(wrap_phase(v - panel.phase_on))
    # ties go to the OFF state
    return CodingMap((d_on < d_off - 1e-12).astype(np.uint8))


def coding_for_angle(panel: RisPanel, theta_i: float, theta_r: float,
                     freq: float | None = None) -> CodingMap:
    return quantize_1bit(continuous_phase_profile(panel, theta_i, theta_r, freq), panel)


def cell_phases(panel: RisPanel, coding: CodingMap) -> np.ndarray:
    bits = np.asarray(coding.bits)
    if bits.shape != panel.shape:
        raise RisError(f"coding shape {bits.shape} does not match panel {panel.shape}")
    return np.where(bits == 1, panel.phase_on, panel.phase_off) + panel.error_draw()


def _element(theta_deg, q):
    return np.clip(np.cos(np.radians(theta_deg)), 0.0, None) ** q


def _array_sum(panel: RisPanel, phases: np.ndarray, s: np.ndarray, freq: float) -> np.ndarray:
    """sum_cells a*exp(j*phase)*exp(j*k*x_m*s) for an array of s = sin(out) + sin(in)."""
    k = 2 * np.pi * freq / C0
    col = (panel.cell_amplitude * np.exp(1j * phases)).sum(axis=1)    # collapse uniform axis
    s = np.asarray(s, dtype=float)
    return np.exp(1j * k * np.multiply.outer(s, panel.x)) @ col


def _grid(step: float) -> np.ndarray:
    if not 0 < step <= 0.1 + 1e-12:
        raise RisError("pattern grid step must be in (0, 0.1] deg")
    n = int(round(180.0 / step))
    return np.linspace(-90.0, 90.0, n + 1)


def phase_pattern(panel: RisPanel, phases: np.ndarray, theta_i: float, freq: float,
                  grid_step: float = 0.1) -> Pattern:
    """Far-field reradiation for arbitrary cell phases (no 1-bit constraint)."""
    ang = _grid(grid_step)
    s = np.sin(np.radians(ang)) + math.sin(math.radians(theta_i))
    g = _array_sum(panel, np.asarray(phases, dtype=float), s, freq) * _element(ang, panel.element_exponent)
    return Pattern(ang, g)


def reradiation_pattern(panel: RisPanel, coding: CodingMap, theta_i: float, freq: float,
                        grid_step: float = 0.1) -> Pattern:
    return phase_pattern(panel, cell_phases(panel, coding), theta_i, freq, grid_step)


def continuous_pattern(panel: RisPanel, profile: PhaseProfile, theta_i: float, freq: float,
                       grid_step: float = 0.1) -> Pattern:
    phases = np.asarray(profile.values) + panel.error_draw()
    return phase_pattern(panel, phases, theta_i, freq, grid_step)


@dataclass(frozen=True)
class PatternMetrics:
    peak_angle: float
    beamwidth_3db: float
    peak_gain_db: float
    highest_sidelobe_db: float

    def as_dict(self) -> dict:
        return {k: float(v) for k, v in self.__dict__.items()}


def pattern_metrics(p: Pattern) -> PatternMetrics:
    a = np.asarray(p.angles)
    mag = np.abs(p.gain)
    i = int(np.argmax(mag))
    peak = mag[i]
    if peak <= 0:
        raise RisError("pattern is identically zero")
    half = peak / math.sqrt(2)

    lo = i
    while lo > 0 and mag[lo - 1] >= half:
        lo -= 1
    hi = i
    while hi < len(mag) - 1 and mag[hi + 1] >= half:
        hi += 1
    # interpolate the -3 dB crossings between grid points
    left = a[lo]
    if lo > 0:
        left = np.interp(half, [mag[lo - 1], mag[lo]], [a[lo - 1], a[lo]])
    right = a[hi]
    if hi < len(mag) - 1:
        right = np.interp(half, [mag[hi + 1], mag[hi]], [a[hi + 1], a[hi]])

    # main lobe extends down to the first minima either side
    lo_m = lo
    while lo_m > 0 and mag[lo_m - 1] <= mag[lo_m]:
        lo_m -= 1
    hi_m = hi
    while hi_m < len(mag) - 1 and mag[hi_m + 1] <= mag[hi_m]:
        hi_m += 1
    interior = (mag[1:-1] >= mag[:-2]) & (mag[1:-1] >= mag[2:])
    maxima = np.flatnonzero(interior) + 1
    edges = [j for j in (0, len(mag) - 1) if (j == 0 and mag[0] > mag[1]) or (j > 0 and mag[j] > mag[j - 1])]
    cands = [j for j in list(maxima) + edges if j < lo_m or j > hi_m]
    side = max((mag[j] for j in cands), default=0.0)
    side_db = 20 * math.log10(side / peak) if side > 0 else -math.inf
    return PatternMetrics(float(a[i]), float(right - left), float(20 * math.log10(peak)), side_db)


def ris_link_gain(panel: RisPanel, coding: CodingMap, theta_in, theta_out, freq: float):
    """Complex gain of the panel for a wave arriving from theta_in and leaving
    toward theta_out (degrees from the normal).

    Normalised so the in-phase full-aperture sum at broadside is n_cols*n_rows.
    The obliquity factor (cos(in)*cos(out))**(q/2) keeps the gain reciprocal.
    """
    tin = np.asarray(theta_in, dtype=float)
    tout = np.asarray(theta_out, dtype=float)
    if np.any(np.abs(tin) >= 90) and np.ndim(tin) == 0:
        raise RisError("incidence angle must be inside (-90, 90)")
    s = np.sin(np.radians(tout)) + np.sin(np.radians(tin))
    ob = np.sqrt(_element(tin, panel.element_exponent) * _element(tout, panel.element_exponent))
    g = _array_sum(panel, cell_phases(panel, coding), s, freq) * ob
    return g[()] if np.ndim(g) == 0 else g
