"""Walking-human kinematics: trajectories T1-T4 and a five-point sinusoidal gait."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .geometry import GeometryError, Point2, Scene, as_point, segments_intersect

C0 = 299_792_458.0


class KinematicsError(ValueError):
    pass


class TrajectoryKind(str, Enum):
    T1 = "T1"   # tangential, LOS, B -> C
    T2 = "T2"   # along +x in the NLOS arm toward the RIS
    T3 = "T3"   # radial toward the radar, turn, recede
    T4 = "T4"   # along -y across the NLOS arm at a standoff from the RIS
    CUSTOM = "custom"


@dataclass(frozen=True)
class Trajectory:
    kind: TrajectoryKind
    waypoints: tuple[tuple[float, Point2], ...]
    speed: float = 1.5
    turnaround: bool = False
    turn_taper: float = 0.2
    facing: tuple[float, float] = (1.0, 0.0)   # limb-swing axis while not moving

    def __post_init__(self):
        f = np.asarray(self.facing, dtype=float)
        if not np.isfinite(f).all() or np.linalg.norm(f) < 1e-12:
            raise KinematicsError("facing must be a non-zero vector")
        object.__setattr__(self, "facing", tuple(f / np.linalg.norm(f)))
        wps = tuple((float(t), as_point(p)) for t, p in self.waypoints)
        object.__setattr__(self, "waypoints", wps)
        if len(wps) < 2:
            raise KinematicsError("trajectory needs at least two waypoints")
        times = np.array([t for t, _ in wps])
        if np.any(np.diff(times) <= 0):
            raise KinematicsError("waypoint times must be strictly increasing")
        if self.speed < 0:
            raise KinematicsError("speed must be non-negative")
        if self.turn_taper < 0:
            raise KinematicsError("turn taper must be non-negative")
        for (t0, p0), (t1, p1) in zip(wps, wps[1:]):
            v = p0.distance(p1) / (t1 - t0)
            if abs(v - self.speed) > 0.1 * max(self.speed, 1e-9) + 1e-9:
                raise KinematicsError(
                    f"segment speed {v:.3f} m/s inconsistent with nominal {self.speed} m/s")
        self._check_taper()

    def _check_taper(self):
        half = self.turn_taper / 2
        for i in self._reversals():
            t_prev, t_i, t_next = (self.waypoints[j][0] for j in (i - 1, i, i + 1))
            if t_i - t_prev < half or t_next - t_i < half:
                raise KinematicsError("segments too short for the turnaround taper")

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.waypoints])

    @property
    def points(self) -> np.ndarray:
        return np.array([p.xy for _, p in self.waypoints])

    @property
    def t_start(self) -> float:
        return self.waypoints[0][0]

    @property
    def t_end(self) -> float:
        return self.waypoints[-1][0]

    def _directions(self) -> np.ndarray:
        d = np.diff(self.points, axis=0)
        n = np.linalg.norm(d, axis=1, keepdims=True)
        return np.divide(d, n, out=np.zeros_like(d), where=n > 0)

    def _reversals(self) -> list[int]:
        if self.turn_taper == 0 or self.speed == 0:
            return []
        d = self._directions()
        return [i + 1 for i in range(len(d) - 1) if np.dot(d[i], d[i + 1]) < -0.999]

    def turn_times(self) -> list[float]:
        return [self.waypoints[i][0] for i in self._reversals()]

    def axis(self, t) -> np.ndarray:
        """Walking axis used for limb swing. Constant through reversals so that
        limb positions stay continuous; changes only at genuine corners."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        d = self._directions()
        ax = d.copy()
        if not ax[0].any():
            ax[0] = self.facing
        for i in range(1, len(d)):
            if np.dot(d[i], ax[i - 1]) < -0.999:
                ax[i] = ax[i - 1]
            elif not d[i].any():
                ax[i] = ax[i - 1]
        seg = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, len(d) - 1)
        return ax[seg]

    def _check_span(self, t):
        if np.any(t < self.t_start - 1e-9) or np.any(t > self.t_end + 1e-9):
            raise KinematicsError("time outside trajectory span")

    def position(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        self._check_span(t)
        times, pts = self.times, self.points
        pos = np.column_stack([np.interp(t, times, pts[:, 0]), np.interp(t, times, pts[:, 1])])
        tau = self.turn_taper
        d = self._directions()
        for i in self._reversals():
            t_a = times[i] - tau / 2
            m = np.abs(t - times[i]) < tau / 2
            if not m.any():
                continue
            u = d[i - 1]
            v = self.speed
            p_a = pts[i] - u * v * tau / 2
            pos[m] = p_a + u * (v * tau / np.pi) * np.sin(np.pi * (t[m] - t_a) / tau)[:, None]
        return pos

    def velocity(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        self._check_span(t)
        times = self.times
        d = self._directions()
        seg_v = d * (np.linalg.norm(np.diff(self.points, axis=0), axis=1) / np.diff(times))[:, None]
        seg = np.clip(np.searchsorted(times, t, side="right") - 1, 0, len(d) - 1)
        vel = seg_v[seg].copy()
        tau = self.turn_taper
        for i in self._reversals():
            m = np.abs(t - times[i]) < tau / 2
            if m.any():
                t_a = times[i] - tau / 2
                vel[m] = d[i - 1] * self.speed * np.cos(np.pi * (t[m] - t_a) / tau)[:, None]
        return vel


@dataclass(frozen=True)
class TrajectoryParams:
    speed: float = 1.5
    duration: float = 3.0
    standoff: float = 2.0                   # T4: distance from the RIS along -x
    start_distance_from_ris: float = 5.0    # T2
    clearance: float = 0.3                  # body clearance from walls / LOS edge
    turn_taper: float = 0.2
    radial_offset: float = 0.4              # T3: lateral offset of the radial lane
    waypoints: tuple = ()                   # custom: ((t, (x, y)), ...)


def _ping_pong(a: np.ndarray, b: np.ndarray, speed: float, duration: float, t0: float = 0.0):
    length = float(np.linalg.norm(b - a))
    if length <= 0 or speed <= 0:
        raise KinematicsError("ping-pong span needs positive length and speed")
    leg = length / speed
    wps = [(t0, a)]
    t, here, there = t0, a, b
    while t < t0 + duration:
        t += leg
        wps.append((t, there))
        here, there = there, here
    return [(tt, Point2(*p)) for tt, p in wps]


def _los_edge_x(scene: Scene, y: float) -> float:
    """x where the ray from the radar past the inner corner crosses the line at height y."""
    r = scene.radar_pos.xy
    c = scene.layout.inner_corner.xy
    return float(r[0] + (c[0] - r[0]) * (y - r[1]) / (c[1] - r[1]))


def build_trajectory(kind, scene: Scene, params: TrajectoryParams | None = None) -> Trajectory:
    p = params or TrajectoryParams()
    kind = TrajectoryKind(kind)
    if kind is TrajectoryKind.CUSTOM:
        if not p.waypoints:
            raise KinematicsError("custom trajectory needs waypoints")
        traj = Trajectory(kind, tuple((t, as_point(q)) for t, q in p.waypoints), p.speed,
                          False, p.turn_taper)
        _check_walls(traj, scene)
        return traj
    if scene.layout is None:
        raise KinematicsError(f"{kind.value} needs a corridor layout in the scene")
    lay = scene.layout
    ris = scene.ris_pos.xy
    radar = scene.radar_pos.xy
    cl = p.clearance
    if kind is TrajectoryKind.T1:
        y = lay.arm_center_y
        x_b = _los_edge_x(scene, y) + cl
        half_bw = math.radians(scene.radar_beamwidth / 2)
        x_c = min(radar[0] + (y - radar[1]) * math.tan(half_bw), lay.stub_right_x - cl)
        a, b = np.array([x_b, y]), np.array([x_c, y])
    elif kind is TrajectoryKind.T2:
        y = ris[1]
        dy = y - ris[1]
        if p.start_distance_from_ris <= abs(dy):
            raise KinematicsError("T2 start distance shorter than lane offset")
        x_a = ris[0] - math.sqrt(p.start_distance_from_ris ** 2 - dy ** 2)
        x_b = _los_edge_x(scene, y) - cl
        a, b = np.array([x_a, y]), np.array([x_b, y])
    elif kind is TrajectoryKind.T3:
        x = radar[0] + p.radial_offset
        top = lay.arm_top_y - cl
        a = np.array([x, top])
        b = np.array([x, top - p.speed * p.duration / 2])
    else:
        x = ris[0] - p.standoff
        a = np.array([x, lay.arm_top_y - cl])
        b = np.array([x, lay.arm_floor_y + cl])
    if np.linalg.norm(b - a) <= p.speed * p.turn_taper / 2:
        raise KinematicsError(f"{kind.value}: walking span too short for this layout")
    wps = _ping_pong(a, b, p.speed, p.duration)
    traj = Trajectory(kind, tuple(wps), p.speed, len(wps) > 2, p.turn_taper)
    _check_walls(traj, scene)
    return traj


def _check_walls(traj: Trajectory, scene: Scene) -> None:
    for (_, p0), (_, p1) in zip(traj.waypoints, traj.waypoints[1:]):
        if p0.distance(p1) < 1e-12:
            continue
        for w in scene.walls:
            if segments_intersect((p0, p1), w.endpoints):
                raise GeometryError(f"trajectory segment {tuple(p0)}->{tuple(p1)} passes through a wall")
    if scene.layout is not None:
        for _, q in traj.waypoints:
            if not scene.layout.contains(q):
                raise GeometryError(f"waypoint {tuple(q)} lies outside the corridor")


class BodyPart(str, Enum):
    TORSO = "torso"
    RIGHT_HAND = "right_hand"
    LEFT_HAND = "left_hand"
    RIGHT_FOOT = "right_foot"
    LEFT_FOOT = "left_foot"


@dataclass(frozen=True)
class GaitParams:
    cadence: float | None = None     # steps/s; None -> 1.8 scaled with speed
    torso_rcs: float = 1.0
    limb_rcs: float = 0.1
    arm_swing_amp: float = 1.0       # m/s
    leg_swing_amp: float = 2.5       # m/s
    n_scatterers: int = 5
    hand_offset: float = 0.25        # lateral rest offsets, m
    foot_offset: float = 0.1

    def __post_init__(self):
        if self.cadence is not None and self.cadence <= 0:
            raise KinematicsError("cadence must be positive")
        if self.torso_rcs <= 0 or self.limb_rcs <= 0:
            raise KinematicsError("RCS values must be positive")
        if self.n_scatterers not in (1, 3, 5):
            raise KinematicsError("n_scatterers must be 1, 3 or 5")

    def cadence_for(self, speed: float) -> float:
        if self.cadence is not None:
            return self.cadence
        if speed <= 0:
            raise KinematicsError("cadence must be given explicitly for a stationary target")
        return 1.8 * speed / 1.5

    def check_nyquist(self, fs: float, freq: float) -> None:
        limit = fs * C0 / (4 * freq)
        if max(self.arm_swing_amp, self.leg_swing_amp) >= limit:
            raise KinematicsError(
                f"limb swing amplitude exceeds the Nyquist speed {limit:.2f} m/s")

    def parts(self) -> list[tuple[BodyPart, float, float, float]]:
        """(part, rcs, swing amplitude, phase) plus lateral offset sign via part."""
        out = [(BodyPart.TORSO, self.torso_rcs, 0.0, 0.0)]
        if self.n_scatterers >= 3:
            out += [(BodyPart.RIGHT_FOOT, self.limb_rcs, self.leg_swing_amp, 0.0),
                    (BodyPart.LEFT_FOOT, self.limb_rcs, self.leg_swing_amp, math.pi)]
        if self.n_scatterers == 5:
            # arms swing opposite to the leg on the same side
            out += [(BodyPart.RIGHT_HAND, self.limb_rcs, self.arm_swing_amp, math.pi),
                    (BodyPart.LEFT_HAND, self.limb_rcs, self.arm_swing_amp, 0.0)]
        return out

    def lateral(self, part: BodyPart) -> float:
        return {BodyPart.TORSO: 0.0,
                BodyPart.RIGHT_HAND: -self.hand_offset, BodyPart.LEFT_HAND: self.hand_offset,
                BodyPart.RIGHT_FOOT: -self.foot_offset, BodyPart.LEFT_FOOT: self.foot_offset}[part]


@dataclass(frozen=True)
class Scatterer:
    position: Point2
    rcs: float
    body_part: BodyPart
    radial_extent: float = 0.0

    def __post_init__(self):
        if self.rcs <= 0:
            raise KinematicsError("scatterer RCS must be positive")


@dataclass
class ScattererTrack:
    part: BodyPart
    rcs: float
    positions: np.ndarray    # (N, 2)
    velocities: np.ndarray   # (N, 2)


def scatterer_tracks(traj: Trajectory, g: GaitParams, times) -> list[ScattererTrack]:
    """Vectorised gait model over a time grid."""
    t = np.atleast_1d(np.asarray(times, dtype=float))
    torso = traj.position(t)
    body_v = traj.velocity(t)
    ax = traj.axis(t)
    lat = np.column_stack([-ax[:, 1], ax[:, 0]])
    w = 2 * np.pi * g.cadence_for(traj.speed)
    tracks = []
    for part, rcs, amp, phi in g.parts():
        disp = -(amp / w) * np.cos(w * t + phi)
        swing_v = amp * np.sin(w * t + phi)
        pos = torso + lat * g.lateral(part) + ax * disp[:, None]
        vel = body_v + ax * swing_v[:, None]
        tracks.append(ScattererTrack(part, rcs, pos, vel))
    return tracks


def gait_scatterers(traj: Trajectory, g: GaitParams, t: float) -> list[Scatterer]:
    return [Scatterer(Point2(*tr.positions[0]), tr.rcs, tr.part)
            for tr in scatterer_tracks(traj, g, [t])]


def stationary(point, duration: float, facing=(1.0, 0.0)) -> Trajectory:
    p = as_point(point)
    return Trajectory(TrajectoryKind.CUSTOM, ((0.0, p), (duration, p)), speed=0.0, turn_taper=0.0,
                      facing=tuple(facing))
