import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wsan_recover.geometry import (
    EPS_GEOM,
    GeometryError,
    Position,
    approach,
    circle_intersections,
    closest_point,
    closest_point_in_disks,
    distance,
)

coord = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
points = st.builds(Position, coord, coord)


@pytest.mark.parametrize(
    "a, b, expected",
    [((0, 0), (0, 0), 0.0), ((0, 0), (3, 4), 5.0), ((1, 1), (4, 5), 5.0)],
)
def test_distance_examples(a, b, expected):
    assert distance(Position(*a), Position(*b)) == expected


def test_position_rejects_non_finite():
    with pytest.raises(GeometryError):
        Position(math.nan, 0)
    with pytest.raises(GeometryError):
        Position(0, math.inf)


@given(points, points)
def test_distance_symmetric_and_nonnegative(a, b):
    assert distance(a, b) == distance(b, a) >= 0
    assert (distance(a, b) == 0) == (a == b)


def test_approach_examples():
    assert approach(Position(4, 0), Position(0, 0), 1) == Position(1, 0)
    assert approach(Position(0.5, 0), Position(0, 0), 1) == Position(0.5, 0)
    got = approach(Position(3, 4), Position(0, 0), 2.5)
    # scale (3,4) by 2.5/5
    assert got == Position(1.5, 2.0)
    assert abs(distance(got, Position(0, 0)) - 2.5) <= EPS_GEOM


def test_approach_coincident_with_zero_stop_is_noop():
    p = Position(2, 2)
    assert approach(p, p, 0) == p


def test_approach_rejects_negative_stop():
    with pytest.raises(GeometryError):
        approach(Position(1, 0), Position(0, 0), -1)


@given(points, points, st.floats(0, 500))
def test_approach_properties(start, target, stop):
    got = approach(start, target, stop)
    d0 = distance(start, target)
    assert distance(got, target) <= d0 + EPS_GEOM
    if d0 > stop:
        assert abs(distance(got, target) - stop) <= 1e-9 * max(1.0, d0)
    else:
        assert got == start
    # collinear with start and target
    cross = (got.x - target.x) * (start.y - target.y) - (got.y - target.y) * (start.x - target.x)
    assert abs(cross) <= 1e-9 * max(1.0, d0) ** 2


def test_circle_intersections_examples():
    pts = circle_intersections(Position(0, 0), Position(2, 0), 2)
    assert len(pts) == 2
    s3 = math.sqrt(3)
    assert pts[0].x == pytest.approx(1) and pts[0].y == pytest.approx(-s3)
    assert pts[1].x == pytest.approx(1) and pts[1].y == pytest.approx(s3)
    assert circle_intersections(Position(0, 0), Position(4, 0), 2) == (Position(2, 0),)
    assert circle_intersections(Position(0, 0), Position(5, 0), 2) == ()


def test_circle_intersections_errors():
    with pytest.raises(GeometryError):
        circle_intersections(Position(1, 1), Position(1, 1), 2)
    with pytest.raises(GeometryError):
        circle_intersections(Position(0, 0), Position(1, 0), 0)


@given(points, points, st.floats(0.01, 1000))
def test_circle_intersections_on_both_circles(a, b, radius):
    if a == b:
        return
    for p in circle_intersections(a, b, radius):
        assert abs(distance(p, a) - radius) <= EPS_GEOM * max(1.0, radius)
        assert abs(distance(p, b) - radius) <= EPS_GEOM * max(1.0, radius)


def test_closest_point_examples():
    assert closest_point([Position(1, 1), Position(5, 5)], Position(0, 0)) == Position(1, 1)
    assert closest_point([Position(1, 0), Position(-1, 0)], Position(0, 0)) == Position(-1, 0)
    s3 = math.sqrt(3)
    # |(1,2)-(1,s3)| = 2-s3 < 2+s3
    assert closest_point([Position(1, s3), Position(1, -s3)], Position(1, 2)) == Position(1, s3)


def test_closest_point_empty():
    with pytest.raises(GeometryError):
        closest_point([], Position(0, 0))


@given(st.lists(points, min_size=1, max_size=6), points, st.randoms())
def test_closest_point_order_independent(cands, ref, rnd):
    shuffled = list(cands)
    rnd.shuffle(shuffled)
    assert closest_point(cands, ref) == closest_point(shuffled, ref)


def test_closest_point_in_disks():
    # start already inside both
    assert closest_point_in_disks(Position(0, 0), [Position(1, 0), Position(0, 1)], 2) == Position(0, 0)
    # projection onto the single disk
    assert closest_point_in_disks(Position(5, 0), [Position(0, 0)], 2) == Position(2, 0)
    # far apart disks
    assert closest_point_in_disks(Position(0, 0), [Position(-10, 0), Position(10, 0)], 2) is None
    # lens vertex: start well above the lens of two unit-spaced disks
    p = closest_point_in_disks(Position(1, 10), [Position(0, 0), Position(2, 0)], 2)
    assert p.x == pytest.approx(1) and p.y == pytest.approx(math.sqrt(3))
