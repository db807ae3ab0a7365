"""2-D corridor scene, visibility and image-method specular paths.

Everything here lives in the horizontal plane at antenna mount height.
Walls are opaque, zero-thickness reflecting segments.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

EPS = 1e-9


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    @property
    def xy(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def distance(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


def as_point(p) -> Point2:
    if isinstance(p, Point2):
        return p
    x, y = p
    return Point2(float(x), float(y))


@dataclass(frozen=True)
class WallSegment:
    p0: Point2
    p1: Point2
    reflection_coeff: float = 0.6
    thickness: float = 0.3  # annotation only
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "p0", as_point(self.p0))
        object.__setattr__(self, "p1", as_point(self.p1))
        if self.p0.distance(self.p1) < EPS:
            raise GeometryError("wall endpoints must be distinct")
        if not 0.0 <= self.reflection_coeff <= 1.0:
            raise GeometryError(
                f"wall reflection coefficient {self.reflection_coeff} outside [0, 1]")

    @property
    def endpoints(self) -> tuple[Point2, Point2]:
        return self.p0, self.p1

    @property
    def length(self) -> float:
        return self.p0.distance(self.p1)

    @property
    def direction(self) -> np.ndarray:
        d = self.p1.xy - self.p0.xy
        return d / np.linalg.norm(d)

    @property
    def normal(self) -> np.ndarray:
        d = self.direction
        return np.array([-d[1], d[0]])

    def distance_to(self, p) -> float:
        p = np.asarray(tuple(p), dtype=float)
        a, b = self.p0.xy, self.p1.xy
        u = np.clip(np.dot(p - a, b - a) / np.dot(b - a, b - a), 0.0, 1.0)
        return float(np.linalg.norm(a + u * (b - a) - p))


def _unit(v) -> np.ndarray:
    v = np.asarray(tuple(v), dtype=float)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n < EPS:
        raise GeometryError("zero-length direction vector")
    return v / n


def unit_from_deg(angle_deg: float) -> np.ndarray:
    a = math.radians(angle_deg)
    return np.array([math.cos(a), math.sin(a)])


@dataclass(frozen=True)
class CorridorLayout:
    """Parametric L-shaped corridor.

    A vertical stub holding the radar (x in [stub_left_x, stub_left_x + width],
    y from stub_bottom_y up) opens into a horizontal arm
    (y in [arm_floor_y, arm_floor_y + width]) that runs toward -x and is
    closed at the stub's right wall. The arm left of the stub is the NLOS
    region; the part of the arm straight above the stub is in view of the radar.
    """

    width: float = 2.4
    arm_floor_y: float = 1.2
    stub_left_x: float = -0.3
    stub_bottom_y: float = -2.0
    arm_end_x: float = -8.0

    def __post_init__(self):
        if self.width <= 0:
            raise GeometryError("corridor width must be positive")
        if self.arm_end_x >= self.stub_left_x or self.stub_bottom_y >= self.arm_floor_y:
            raise GeometryError("corridor arms have non-positive length")

    @property
    def stub_right_x(self) -> float:
        return self.stub_left_x + self.width

    @property
    def arm_top_y(self) -> float:
        return self.arm_floor_y + self.width

    @property
    def arm_center_y(self) -> float:
        return self.arm_floor_y + 0.5 * self.width

    @property
    def inner_corner(self) -> Point2:
        return Point2(self.stub_left_x, self.arm_floor_y)

    def walls(self, reflection_coeff: float = 0.6, thickness: float = 0.3) -> list[WallSegment]:
        xl, xr = self.stub_left_x, self.stub_right_x
        yb, yf, yt = self.stub_bottom_y, self.arm_floor_y, self.arm_top_y
        xe = self.arm_end_x
        segs = [
            ("stub_left", (xl, yb), (xl, yf)),
            ("arm_floor", (xe, yf), (xl, yf)),
            ("arm_top", (xe, yt), (xr, yt)),
            ("right", (xr, yb), (xr, yt)),
            ("stub_bottom", (xl, yb), (xr, yb)),
            ("arm_end", (xe, yf), (xe, yt)),
        ]
        return [WallSegment(Point2(*a), Point2(*b), reflection_coeff, thickness, name)
                for name, a, b in segs]

    def contains(self, p) -> bool:
        x, y = tuple(p)
        in_stub = self.stub_left_x < x < self.stub_right_x and self.stub_bottom_y < y < self.arm_top_y
        in_arm = self.arm_end_x < x < self.stub_right_x and self.arm_floor_y < y < self.arm_top_y
        return in_stub or in_arm


@dataclass(frozen=True)
class Scene:
    walls: tuple[WallSegment, ...]
    radar_pos: Point2 = Point2(0.0, 0.0)
    radar_boresight: tuple[float, float] = (0.0, 1.0)
    radar_beamwidth: float = 50.0
    ris_pos: Point2 = Point2(0.0, 1.8)
    ris_normal: tuple[float, float] = (-math.sqrt(3) / 2, -0.5)
    mount_height: float = 1.1  # annotation only
    layout: CorridorLayout | None = None

    def __post_init__(self):
        object.__setattr__(self, "walls", tuple(self.walls))
        object.__setattr__(self, "radar_pos", as_point(self.radar_pos))
        object.__setattr__(self, "ris_pos", as_point(self.ris_pos))
        object.__setattr__(self, "radar_boresight", tuple(_unit(self.radar_boresight)))
        object.__setattr__(self, "ris_normal", tuple(_unit(self.ris_normal)))
        if not 0 < self.radar_beamwidth <= 360:
            raise GeometryError("radar beamwidth must be in (0, 360] degrees")
        for name, p in (("radar", self.radar_pos), ("RIS", self.ris_pos)):
            for w in self.walls:
                if w.distance_to(p) < 1e-6:
                    raise GeometryError(f"{name} position {tuple(p)} lies on wall {w.name or w.endpoints}")

    @property
    def ris_tangent(self) -> np.ndarray:
        # steering axis: normal rotated by -90 deg; positive angles lie on this side
        n = np.asarray(self.ris_normal)
        return np.array([n[1], -n[0]])

    def ris_angle_deg(self, direction) -> np.ndarray:
        """Signed angle(s) from the RIS normal toward the steering axis, degrees."""
        d = np.asarray(direction, dtype=float)
        n = np.asarray(self.ris_normal)
        t = self.ris_tangent
        return np.degrees(np.arctan2(d @ t, d @ n))

    def radar_offset_deg(self, direction) -> np.ndarray:
        """Unsigned angle(s) between direction(s) and the radar boresight, degrees."""
        d = np.asarray(direction, dtype=float)
        b = np.asarray(self.radar_boresight)
        cross = d[..., 0] * b[1] - d[..., 1] * b[0]
        return np.degrees(np.abs(np.arctan2(cross, d @ b)))


def canonical_scene(layout: CorridorLayout | None = None, **overrides) -> Scene:
    layout = layout or CorridorLayout()
    coeff = overrides.pop("reflection_coeff", 0.6)
    return Scene(walls=tuple(layout.walls(coeff)), layout=layout, **overrides)


# ---------------------------------------------------------------------------
# primitives

def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _segments_cross(a0, a1, b0, b1, eps=EPS):
    """Vectorised open-interior intersection test (broadcasting over leading dims)."""
    r = a1 - a0
    s = b1 - b0
    denom = _cross(r, s)
    qp = b0 - a0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t = _cross(qp, s) / denom
        u = _cross(qp, r) / denom
    parallel = np.abs(denom) < eps * np.linalg.norm(r, axis=-1) * np.linalg.norm(s, axis=-1) + 1e-300
    hit = (t > eps) & (t < 1 - eps) & (u > eps) & (u < 1 - eps)
    return hit & ~parallel


def segments_intersect(a: Sequence, b: Sequence) -> bool:
    """True iff the open interiors of segments a=(p, q) and b=(r, s) intersect.

    Touching at an endpoint is not an intersection; collinear overlap is
    treated as non-crossing.
    """
    a0, a1 = (np.asarray(tuple(p), dtype=float) for p in a)
    b0, b1 = (np.asarray(tuple(p), dtype=float) for p in b)
    if np.linalg.norm(a1 - a0) < EPS or np.linalg.norm(b1 - b0) < EPS:
        raise GeometryError("degenerate zero-length segment")
    return bool(_segments_cross(a0, a1, b0, b1))


def _wall_arrays(walls: Iterable[WallSegment]):
    walls = list(walls)
    if not walls:
        return np.zeros((0, 2)), np.zeros((0, 2))
    w0 = np.array([w.p0.xy for w in walls])
    w1 = np.array([w.p1.xy for w in walls])
    return w0, w1


def _blocked(p, q, w0, w1):
    """Boolean array: leg p->q (shape (..., 2)) crosses any wall interior."""
    if len(w0) == 0:
        return np.zeros(p.shape[:-1], dtype=bool)
    hit = _segments_cross(p[..., None, :], q[..., None, :], w0, w1)
    return hit.any(axis=-1)


def line_of_sight(scene: Scene, p, q) -> bool:
    p = as_point(p).xy
    q = as_point(q).xy
    if np.linalg.norm(q - p) < 1e-9:
        raise GeometryError("line_of_sight needs two distinct points")
    w0, w1 = _wall_arrays(scene.walls)
    return not bool(_blocked(p, q, w0, w1))


def mirror_point(p, wall: WallSegment) -> Point2:
    """Reflect p across the infinite line through the wall."""
    xy = _mirror(as_point(p).xy, wall.p0.xy, wall.normal)
    return Point2(float(xy[0]), float(xy[1]))


def _mirror(p, a, n):
    return p - 2.0 * np.asarray((p - a) @ n)[..., None] * n


# ---------------------------------------------------------------------------
# image-method tracing

@dataclass(frozen=True)
class PropagationPath:
    vertices: tuple[Point2, ...]
    leg_lengths: tuple[float, ...]
    wall_coeff_product: float = 1.0
    via_ris: bool = False
    walls: tuple[int, ...] = field(default=(), compare=False)

    @property
    def length(self) -> float:
        return float(sum(self.leg_lengths))

    @property
    def n_bounces(self) -> int:
        return len(self.walls)

    def departure(self) -> np.ndarray:
        """Unit vector of the first leg."""
        return _unit(np.subtract(tuple(self.vertices[1]), tuple(self.vertices[0])))


def wall_sequences(n_walls: int, max_bounces: int):
    """Ordered wall index sequences with no immediate repeats, shortest first."""
    for k in range(max_bounces + 1):
        for seq in itertools.product(range(n_walls), repeat=k):
            if all(seq[i] != seq[i + 1] for i in range(k - 1)):
                yield seq


@dataclass
class BatchRoute:
    """One wall sequence evaluated for many destinations at once."""

    walls: tuple[int, ...]
    valid: np.ndarray        # (N,) bool
    length: np.ndarray       # (N,) unfolded length, nan where invalid
    coeff: float
    departure: np.ndarray    # (N, 2) unit vector leaving the source
    arrival: np.ndarray      # (N, 2) unit vector of the last leg (toward dst)
    vertices: list           # list of (N, 2) arrays: src, reflection points..., dst


def trace_batch(scene: Scene, src, dsts: np.ndarray, max_bounces: int) -> list[BatchRoute]:
    """Image-method paths from one source to N destinations.

    Returns one BatchRoute per wall sequence that is valid for at least one
    destination. Reflection points must lie on their wall segments and every
    leg must be unobstructed.
    """
    if max_bounces < 0:
        raise GeometryError("max_bounces must be >= 0")
    src = as_point(src).xy
    dsts = np.atleast_2d(np.asarray(dsts, dtype=float))
    n = len(dsts)
    w0, w1 = _wall_arrays(scene.walls)
    normals = np.array([w.normal for w in scene.walls]) if scene.walls else np.zeros((0, 2))
    coeffs = [w.reflection_coeff for w in scene.walls]

    routes = []
    for seq in wall_sequences(len(scene.walls), max_bounces):
        images = [src]
        for wi in seq:
            images.append(_mirror(images[-1], w0[wi], normals[wi]))
        valid = np.ones(n, dtype=bool)
        # backtrack reflection points from the destination
        target = dsts.copy()
        points = []
        for j in range(len(seq) - 1, -1, -1):
            wi = seq[j]
            img = images[j + 1]
            r = target - img
            s = w1[wi] - w0[wi]
            denom = _cross(r, s)
            qp = w0[wi] - img
            with np.errstate(divide="ignore", invalid="ignore"):
                t = _cross(qp, s) / denom
                u = _cross(qp, r[..., :]) / denom
            ok = (np.abs(denom) > EPS) & (t > EPS) & (t < 1 - EPS) & (u >= 0) & (u <= 1)
            valid &= ok
            refl = img + np.where(ok, t, 0.0)[:, None] * r
            points.append(refl)
            target = refl
        points.reverse()
        verts = [np.broadcast_to(src, dsts.shape)] + points + [dsts]
        legs = [np.linalg.norm(verts[i + 1] - verts[i], axis=-1) for i in range(len(verts) - 1)]
        for leg in legs:
            valid &= leg > 1e-9
        if not valid.any():
            continue
        for i in range(len(verts) - 1):
            valid &= ~_blocked(verts[i], verts[i + 1], w0, w1)
        if not valid.any():
            continue
        length = np.where(valid, np.sum(legs, axis=0), np.nan)
        with np.errstate(invalid="ignore", divide="ignore"):
            dep = (verts[1] - verts[0]) / legs[0][:, None]
            arr = (verts[-1] - verts[-2]) / legs[-1][:, None]
        routes.append(BatchRoute(seq, valid, length, float(np.prod([coeffs[w] for w in seq])),
                                 dep, arr, verts))
    return routes


def trace_paths(scene: Scene, src, dst, max_bounces: int = 2) -> list[PropagationPath]:
    """All unblocked specular paths src -> dst with at most max_bounces wall hits,
    sorted by total length."""
    src_p, dst_p = as_point(src), as_point(dst)
    out = []
    for route in trace_batch(scene, src_p, dst_p.xy[None, :], max_bounces):
        if not route.valid[0]:
            continue
        verts = tuple(Point2(float(v[0][0]), float(v[0][1])) for v in route.vertices)
        legs = tuple(verts[i].distance(verts[i + 1]) for i in range(len(verts) - 1))
        out.append(PropagationPath(verts, legs, route.coeff, False, route.walls))
    out.sort(key=lambda p: p.length)
    return out


def ris_path(scene: Scene, tail: PropagationPath) -> PropagationPath:
    """Prefix a RIS->dst path with the radar->RIS leg."""
    if tail.vertices[0] != scene.ris_pos:
        raise GeometryError("RIS path tail must start at the RIS")
    head = scene.radar_pos.distance(scene.ris_pos)
    return PropagationPath((scene.radar_pos,) + tail.vertices, (head,) + tail.leg_lengths,
                           tail.wall_coeff_product, True, tail.walls)


class Region(str, Enum):
    LOS = "LOS"
    NLOS = "NLOS"


def classify_region(scene: Scene, p) -> Region:
    p = as_point(p)
    if p.distance(scene.radar_pos) < 1e-9:
        raise GeometryError("point coincides with the radar")
    if not line_of_sight(scene, scene.radar_pos, p):
        return Region.NLOS
    off = float(scene.radar_offset_deg(p.xy - scene.radar_pos.xy))
    return Region.LOS if off <= scene.radar_beamwidth / 2 + 1e-12 else Region.NLOS


def snell_residual(path: PropagationPath, scene: Scene) -> float:
    """Largest |angle_in - angle_out| (rad) over the wall-reflection vertices."""
    worst = 0.0
    for k, wi in enumerate(path.walls):
        i = k + 1 + (1 if path.via_ris else 0)
        prev, v, nxt = (np.array(tuple(path.vertices[j])) for j in (i - 1, i, i + 1))
        n = scene.walls[wi].normal
        a_in = math.acos(min(1.0, abs(np.dot(_unit(prev - v), n))))
        a_out = math.acos(min(1.0, abs(np.dot(_unit(nxt - v), n))))
        worst = max(worst, abs(a_in - a_out))
    return worst
