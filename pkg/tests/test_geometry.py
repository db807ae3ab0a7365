import math

import numpy as np
import pytest
from hypothesis import assume, example, given, settings
from hypothesis import strategies as st

from corner_ris_sim.geometry import (
    CorridorLayout, GeometryError, Point2, Region, Scene, WallSegment, canonical_scene,
    classify_region, line_of_sight, mirror_point, segments_intersect, snell_residual, trace_paths,
)
from oracles import launch, near_endpoint

coord = st.floats(-5, 5, allow_nan=False)


def test_segments_intersect_examples():
    assert segments_intersect(((0, 0), (2, 0)), ((1, -1), (1, 1)))
    assert not segments_intersect(((0, 0), (2, 0)), ((0, 1), (2, 1)))
    assert not segments_intersect(((0, 0), (2, 0)), ((2, 0), (3, 1)))


def test_degenerate_segment_rejected():
    with pytest.raises(GeometryError):
        segments_intersect(((0, 0), (0, 0)), ((1, -1), (1, 1)))
    with pytest.raises(GeometryError):
        WallSegment((1, 1), (1, 1))


def test_point_and_wall_validation():
    with pytest.raises(GeometryError):
        Point2(math.nan, 0)
    with pytest.raises(GeometryError):
        WallSegment((0, 0), (1, 0), reflection_coeff=1.2)


def test_mirror_examples():
    wall = WallSegment((0, 0), (5, 0))
    assert tuple(mirror_point((1, 1), wall)) == pytest.approx((1, -1))
    assert tuple(mirror_point((3, 0), wall)) == pytest.approx((3, 0))


@given(coord, coord, coord, coord, coord, coord)
def test_mirror_is_involution(px, py, ax, ay, bx, by):
    assume(math.hypot(bx - ax, by - ay) > 1e-3)
    w = WallSegment((ax, ay), (bx, by))
    back = mirror_point(mirror_point((px, py), w), w)
    assert tuple(back) == pytest.approx((px, py), abs=1e-9)


def test_canonical_los_and_nlos():
    s = canonical_scene()
    assert line_of_sight(s, s.radar_pos, (0.5, 2.4))        # B-C stretch of the arm
    assert not line_of_sight(s, s.radar_pos, (-3.0, 2.4))   # behind the corner
    assert classify_region(s, (0.0, 3.0)) is Region.LOS
    assert classify_region(s, (-3.0, 2.4)) is Region.NLOS


def test_line_of_sight_rejects_coincident_points():
    with pytest.raises(GeometryError):
        line_of_sight(canonical_scene(), (1.0, 1.0), (1.0, 1.0))


def test_beam_gate():
    s = Scene([], radar_beamwidth=50)
    off = math.radians(1.2 * 25)
    assert classify_region(s, (3 * math.sin(off), 3 * math.cos(off))) is Region.NLOS
    off = math.radians(0.8 * 25)
    assert classify_region(s, (3 * math.sin(off), 3 * math.cos(off))) is Region.LOS


def test_scene_rejects_radar_on_wall():
    with pytest.raises(GeometryError):
        Scene([WallSegment((-1, 0), (1, 0))], radar_pos=(0, 0))


@given(st.tuples(coord, coord), st.tuples(coord, coord))
def test_line_of_sight_symmetric(p, q):
    assume(math.dist(p, q) > 1e-6)
    s = canonical_scene()
    assert line_of_sight(s, p, q) == line_of_sight(s, q, p)


def test_direct_only_with_zero_bounces():
    s = Scene([WallSegment((-5, -1), (5, -1))], ris_pos=(3, 3))
    paths = trace_paths(s, (0, 0), (2, 1), max_bounces=0)
    assert len(paths) == 1 and paths[0].n_bounces == 0
    assert paths[0].length == pytest.approx(math.hypot(2, 1))


def test_single_wall_snell():
    s = Scene([WallSegment((-5, -1), (5, -1))], ris_pos=(3, 3))
    paths = trace_paths(s, (0, 0), (2, 1), max_bounces=1)
    assert [p.n_bounces for p in paths] == [0, 1]
    assert snell_residual(paths[1], s) < 1e-9
    # image at (0, -2): unfolded length |(2,1) - (0,-2)|
    assert paths[1].length == pytest.approx(math.hypot(2, 3))
    assert paths[1].wall_coeff_product == pytest.approx(0.6)


def test_corner_blocks_direct():
    s = canonical_scene()
    paths = trace_paths(s, s.radar_pos, (-2.0, 2.4), max_bounces=1)
    assert paths and all(p.n_bounces == 1 for p in paths)


# a four-wall corner scene for the brute-force comparison
CORNER = [((-1.0, -1.0), (3.0, -1.0)), ((3.0, -1.0), (3.0, 4.0)),
          ((-1.0, 2.0), (1.0, 2.0)), ((1.0, 2.0), (1.0, 4.0))]


def _scene(walls):
    return Scene([WallSegment(*w) for w in walls], radar_pos=(-0.9, -0.9), ris_pos=(2.9, 3.9))


def _compare_with_rays(walls, src, dst):
    scene = _scene(walls)
    img = trace_paths(scene, src, dst, max_bounces=2)
    ref = launch(walls, src, dst, max_bounces=2)
    img_v = {p.walls: [tuple(v) for v in p.vertices] for p in img}
    if any(near_endpoint(walls, v) for v in img_v.values()) or \
            any(near_endpoint(walls, v) for _, v in ref.values()):
        return False
    assert set(img_v) == set(ref)
    for p in img:
        assert abs(p.length - ref[p.walls][0]) <= 0.01
        assert snell_residual(p, scene) < 1e-9
    return True


@pytest.mark.parametrize("dst", [(2.0, 3.0), (2.5, 0.5), (0.0, 1.0), (1.8, 1.2)])
def test_ray_launch_oracle_fixed_points(dst):
    assert _compare_with_rays(CORNER, (0.0, 0.0), dst)


inside = st.tuples(st.floats(-0.8, 2.8), st.floats(-0.8, 1.8))


@settings(max_examples=15, deadline=None)
@given(inside, inside)
def test_ray_launch_oracle_random(src, dst):
    assume(math.dist(src, dst) > 0.1)
    assume(_compare_with_rays(CORNER, src, dst))


@settings(max_examples=10, deadline=None)
@given(st.tuples(st.floats(-3, 3), st.floats(0.2, 3)), st.tuples(st.floats(-3, 3), st.floats(0.2, 3)))
def test_ray_launch_oracle_two_parallel_walls(src, dst):
    assume(math.dist(src, dst) > 0.1)
    walls = [((-6.0, 0.0), (6.0, 0.0)), ((-6.0, 3.2), (6.0, 3.2))]
    assume(_compare_with_rays(walls, src, dst))


@settings(max_examples=30, deadline=None)
@given(st.tuples(st.floats(-7.5, 1.8), st.floats(1.25, 3.55)))
@example((1e-06, 2.0))          # near-normal bounce, residual is pure round-off
def test_paths_sorted_and_direct_shortest(p):
    s = canonical_scene()
    assume(s.layout.contains(p) and math.dist(p, (0, 0)) > 0.1)
    paths = trace_paths(s, s.radar_pos, p, max_bounces=2)
    lengths = [q.length for q in paths]
    assert lengths == sorted(lengths)
    if line_of_sight(s, s.radar_pos, p):
        assert paths[0].n_bounces == 0
    for q in paths:
        assert all(leg > 0 for leg in q.leg_lengths)
        assert snell_residual(q, s) < 1e-8
        for wi, v in zip(q.walls, q.vertices[1:-1]):
            assert s.walls[wi].distance_to(v) < 1e-9


def test_layout_geometry():
    lay = CorridorLayout()
    assert lay.arm_top_y - lay.arm_floor_y == pytest.approx(2.4)
    assert lay.stub_right_x - lay.stub_left_x == pytest.approx(2.4)
    assert lay.contains((0, 0)) and lay.contains((-5, 2.4)) and not lay.contains((-5, 0))


def test_ris_incidence_convention():
    s = canonical_scene()
    assert float(s.ris_angle_deg(s.radar_pos.xy - s.ris_pos.xy)) == pytest.approx(-60.0)
    assert float(s.ris_angle_deg(np.array([-1.0, 0.0]))) == pytest.approx(30.0)
