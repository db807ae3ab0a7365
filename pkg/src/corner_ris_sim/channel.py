"""Monostatic CW slow-time signal synthesis over direct, wall-bounce and RIS-relayed paths."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import PropagationPath, Scene, line_of_sight, trace_batch
from .kinematics import GaitParams, Trajectory, scatterer_tracks
from .ris import CodingMap, RisPanel, ris_link_gain

C0 = 299_792_458.0
THREADS_ENV = "CORNER_RIS_SIM_THREADS"


class PhysicsError(ValueError):
    """A physical-validity guard was violated (near field, aliasing, ...)."""


@dataclass(frozen=True)
class RadarConfig:
    freq: float = 5.5e9
    tx_power_dbm: float = 3.0
    fs: float = 370.0
    duration: float = 3.0
    antenna_gain_db: float = 12.0
    antenna_beamwidth: float = 50.0
    noise_floor_dbm: float | None = -90.0
    clutter_dbm: float | None = -40.0
    max_bounces: int = 2

    def __post_init__(self):
        if self.fs <= 0 or self.duration <= 0 or self.freq <= 0:
            raise ValueError("fs, duration and freq must be positive")
        if self.max_bounces < 0:
            raise ValueError("max_bounces must be >= 0")

    @property
    def wavelength(self) -> float:
        return C0 / self.freq

    @property
    def n_samples(self) -> int:
        return int(round(self.fs * self.duration))

    @property
    def max_unaliased_speed(self) -> float:
        return self.fs * C0 / (4 * self.freq)

    def amplitude_scale(self) -> float:
        """sqrt(Pt) * G * lambda/(4 pi) / sqrt(4 pi), in sqrt(mW) * m."""
        pt = 10 ** (self.tx_power_dbm / 10)
        g = 10 ** (self.antenna_gain_db / 10)
        return math.sqrt(pt) * g * self.wavelength / (4 * math.pi) / math.sqrt(4 * math.pi)


@dataclass(frozen=True)
class RisSetup:
    panel: RisPanel
    coding: CodingMap


@dataclass
class BasebandSignal:
    samples: np.ndarray
    fs: float
    t0: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if not np.all(np.isfinite(self.samples)):
            raise PhysicsError("non-finite baseband samples")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(len(self.samples)) / self.fs

    def __len__(self):
        return len(self.samples)

    def to_csv(self, path) -> None:
        rows = np.column_stack([self.times, self.samples.real, self.samples.imag])
        np.savetxt(path, rows, delimiter=",", header="t,re,im", comments="", fmt="%.9g")

    @classmethod
    def from_csv(cls, path) -> "BasebandSignal":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        t = data[:, 0]
        fs = 1.0 / float(np.median(np.diff(t))) if len(t) > 1 else 1.0
        return cls(data[:, 1] + 1j * data[:, 2], fs, float(t[0]))


def antenna_weight(offset_deg, beamwidth_deg: float):
    """Amplitude weight of a Gaussian main lobe with the given 3-dB beamwidth."""
    x = np.asarray(offset_deg, dtype=float) / beamwidth_deg
    return np.exp(-2 * math.log(2) * x ** 2)


def _ris_scale(panel: RisPanel, wavelength: float) -> float:
    # physical-optics scattering length of one cell (area / wavelength)
    return panel.period ** 2 / wavelength


def one_way_factor(path: PropagationPath, scene: Scene, cfg: RadarConfig,
                   ris: RisSetup | None = None) -> complex:
    """Radar-end antenna weight x spreading x wall losses (x RIS gain) for one direction."""
    lam = cfg.wavelength
    end_legs = (path.leg_lengths[0], path.leg_lengths[-1])
    if path.via_ris:
        end_legs += (path.leg_lengths[1],)
    if min(end_legs) < lam:
        raise PhysicsError(f"path leg {min(end_legs):.4f} m shorter than one wavelength")
    v = [np.array(tuple(p)) for p in path.vertices]
    dep = v[1] - v[0]
    w = float(antenna_weight(scene.radar_offset_deg(dep), cfg.antenna_beamwidth))
    if not path.via_ris:
        return complex(w * path.wall_coeff_product / path.length)
    if ris is None:
        raise ValueError("RIS path needs a RisSetup")
    th_in = float(scene.ris_angle_deg(v[0] - v[1]))
    th_out = float(scene.ris_angle_deg(v[2] - v[1]))
    if abs(th_in) >= 90 or abs(th_out) >= 90:
        return 0j
    g = ris_link_gain(ris.panel, ris.coding, th_in, th_out, cfg.freq)
    r1 = path.leg_lengths[0]
    r2 = sum(path.leg_lengths[1:])
    return complex(w * _ris_scale(ris.panel, lam) * g * path.wall_coeff_product / (r1 * r2))


def path_amplitude(path: PropagationPath, rcs: float, cfg: RadarConfig, scene: Scene,
                   ris: RisSetup | None = None, back: PropagationPath | None = None) -> complex:
    """Complex received amplitude (sqrt(mW)) for the round trip out along `path`
    and back along `back` (default: the same path reversed)."""
    if rcs <= 0:
        raise ValueError("RCS must be positive")
    back = back or path
    f = one_way_factor(path, scene, cfg, ris) * one_way_factor(back, scene, cfg, ris)
    k = 2 * math.pi * cfg.freq / C0
    phase = np.exp(-1j * k * (path.length + back.length))
    return complex(cfg.amplitude_scale() * math.sqrt(rcs) * f * phase)


def _one_way_field(scene: Scene, cfg: RadarConfig, ris: RisSetup | None, pos: np.ndarray) -> np.ndarray:
    """Sum over one-way routes of factor * exp(-j k L) for N scatterer positions."""
    lam = cfg.wavelength
    k = 2 * math.pi / lam
    radar = scene.radar_pos.xy
    field = np.zeros(len(pos), dtype=complex)

    for r in trace_batch(scene, scene.radar_pos, pos, cfg.max_bounces):
        _guard_legs(r, lam)
        w = antenna_weight(scene.radar_offset_deg(r.departure), cfg.antenna_beamwidth)
        term = w * r.coeff / r.length * np.exp(-1j * k * r.length)
        field += np.where(r.valid, term, 0)

    if ris is not None:
        ris_xy = scene.ris_pos.xy
        r1 = float(np.linalg.norm(ris_xy - radar))
        if r1 < lam:
            raise PhysicsError("radar-RIS distance shorter than one wavelength")
        if line_of_sight(scene, scene.radar_pos, scene.ris_pos):
            th_in = float(scene.ris_angle_deg(radar - ris_xy))
            w = float(antenna_weight(scene.radar_offset_deg(ris_xy - radar), cfg.antenna_beamwidth))
            scale = _ris_scale(ris.panel, lam)
            for r in trace_batch(scene, scene.ris_pos, pos, cfg.max_bounces):
                _guard_legs(r, lam)
                th_out = scene.ris_angle_deg(np.nan_to_num(r.departure))
                front = r.valid & (np.abs(th_out) < 90) & (abs(th_in) < 90)
                if not front.any():
                    continue
                g = ris_link_gain(ris.panel, ris.coding, th_in, np.where(front, th_out, 0.0), cfg.freq)
                L = np.where(front, r.length, 1.0)
                term = w * scale * g * r.coeff / (r1 * L) * np.exp(-1j * k * (r1 + L))
                field += np.where(front, term, 0)
    return field


def _guard_legs(route, lam):
    # only legs touching an endpoint; wall-to-wall legs inside a corner are fine
    v = route.vertices
    for a, b in {(0, 1), (len(v) - 2, len(v) - 1)}:
        leg = np.linalg.norm(v[b] - v[a], axis=-1)
        if np.any(route.valid & (leg < lam)):
            raise PhysicsError(f"scatterer within one wavelength ({lam:.4f} m) of a path vertex")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def synthesize_baseband(scene: Scene, ris: RisSetup | None, traj: Trajectory, gait: GaitParams,
                        cfg: RadarConfig, seed: int = 0, t0: float = 0.0) -> BasebandSignal:
    n = cfg.n_samples
    t = t0 + np.arange(n) / cfg.fs
    if traj.t_start > t[0] + 1e-9 or traj.t_end < t[-1] - 1e-9:
        raise PhysicsError("trajectory does not cover the capture interval")
    v_max = traj.speed + max(gait.arm_swing_amp, gait.leg_swing_amp)
    f_max = 2 * cfg.freq * v_max / C0
    if f_max >= cfg.fs / 2:
        raise PhysicsError(f"Doppler bound {f_max:.1f} Hz exceeds Nyquist {cfg.fs / 2:.1f} Hz")

    tracks = scatterer_tracks(traj, gait, t)
    amp0 = cfg.amplitude_scale()

    def work(idx):
        acc = np.zeros(len(idx), dtype=complex)
        for tr in tracks:
            u = _one_way_field(scene, cfg, ris, tr.positions[idx])
            acc += amp0 * math.sqrt(tr.rcs) * u * u
        return acc

    chunks = np.array_split(np.arange(n), min(_threads(), n))
    if len(chunks) == 1:
        x = work(chunks[0])
    else:
        with ThreadPoolExecutor(len(chunks)) as pool:
            x = np.concatenate(list(pool.map(work, chunks)))

    rng = np.random.default_rng(seed)
    if cfg.clutter_dbm is not None:
        x = x + math.sqrt(10 ** (cfg.clutter_dbm / 10)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    if cfg.noise_floor_dbm is not None:
        sigma = math.sqrt(10 ** (cfg.noise_floor_dbm / 10) / 2)
        x = x + sigma * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return BasebandSignal(x, cfg.fs, t0)


def point_signal(scene: Scene, ris: RisSetup | None, positions: np.ndarray, rcs: float,
                 cfg: RadarConfig) -> np.ndarray:
    """Noise-free return of a single point scatterer along a sampled track."""
    u = _one_way_field(scene, cfg, ris, np.asarray(positions, dtype=float))
    return cfg.amplitude_scale() * math.sqrt(rcs) * u * u
