import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coverplan.errors import InvalidParameter
from coverplan.geometry import (ObservationParams, Point2D, RectObject, Side, angle_between,
                                distance, efficiently_observes, side_id, sides_of)
from coverplan.instance import Instance

FLAT = Side(1, 0, Point2D(0, 0), Point2D(2, 0), Point2D(0, 1), Point2D(1, 0))
PARAMS0 = ObservationParams(math.radians(60), 4.0, 0.0)


def test_unit_square_bottom_side():
    bottom = sides_of(RectObject(0, Point2D(0, 0), 1, 1))[0]
    assert bottom.a == (-0.5, -0.5)
    assert bottom.b == (0.5, -0.5)
    assert bottom.midpoint == (0, -0.5)
    assert bottom.normal == (0, 1)


def test_right_side_midpoint_of_wide_object():
    right = sides_of(RectObject(0, Point2D(0, 0), 2, 1))[1]
    assert right.midpoint == (1, 0)


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(0.1, 10), st.floats(0.1, 10))
def test_midpoints_average_to_center(cx, cy, l, w):
    mids = [s.midpoint for s in sides_of(RectObject(0, Point2D(cx, cy), l, w))]
    assert sum(m.x for m in mids) / 4 == pytest.approx(cx, abs=1e-9)
    assert sum(m.y for m in mids) / 4 == pytest.approx(cy, abs=1e-9)


def test_side_ids_are_one_based_and_dense():
    inst = Instance(tuple(RectObject(i, Point2D(10 * i, 0), 1, 1) for i in range(3)), Point2D(-5, -5))
    assert [s.id for s in inst.sides] == list(range(1, 13))
    assert side_id(2, 3) == 12
    assert inst.side(7).object == 1


def test_normals_point_into_the_object():
    obj = RectObject(0, Point2D(3, 4), 2, 1)
    for s in sides_of(obj):
        probe = (s.midpoint.x + 0.1 * s.normal.x, s.midpoint.y + 0.1 * s.normal.y)
        assert obj.contains(probe)


def test_frontal_point_observes():
    # both endpoint angles are 45 degrees, both distances sqrt(2)
    assert angle_between((0, 1), (-1, 1)) == pytest.approx(math.pi / 4)
    assert efficiently_observes((1, -1), FLAT, PARAMS0)


def test_far_point_rejected():
    assert not efficiently_observes((1, -5), FLAT, PARAMS0)


def test_back_side_rejected():
    assert not efficiently_observes((1, 1), FLAT, PARAMS0)


def test_too_close_rejected_by_d_min():
    assert not efficiently_observes((1, -0.2), FLAT, ObservationParams(math.radians(60), 4.0, 1.0))


def test_angle_boundary_is_inclusive():
    # endpoint b seen at exactly 60 degrees from the normal
    p = (2 - math.sqrt(3), -1)
    params = ObservationParams(math.radians(60), 4.0, 0.0)
    assert angle_between((0, 1), (2 - p[0], -p[1])) == pytest.approx(math.radians(60))
    assert efficiently_observes(p, FLAT, params)


@pytest.mark.parametrize("p,q,d", [((0, 0), (3, 4), 5), ((1, 1), (1, 1), 0), ((0, 0), (1, 0), 1)])
def test_distance(p, q, d):
    assert distance(p, q) == d


@pytest.mark.parametrize("kw", [dict(theta=0), dict(d_min=5), dict(d_min=-1), dict(perception_radius=0)])
def test_bad_params(kw):
    with pytest.raises(InvalidParameter):
        ObservationParams(**kw)


def test_bad_object():
    with pytest.raises(InvalidParameter):
        RectObject(0, Point2D(0, 0), 0, 1)


@settings(max_examples=200)
@given(st.floats(-4, 6), st.floats(-6, 1), st.floats(-100, 100), st.floats(-100, 100))
def test_observation_is_translation_invariant(px, py, dx, dy):
    moved = Side(1, 0, Point2D(dx, dy), Point2D(2 + dx, dy), Point2D(0, 1), Point2D(1 + dx, dy))
    a = efficiently_observes((px, py), FLAT, PARAMS0)
    b = efficiently_observes((px + dx, py + dy), moved, PARAMS0)
    if a != b:
        # only tolerated within rounding distance of a boundary
        assert abs(math.dist((px, py), (0, 0)) - 4) < 1e-6 or abs(math.dist((px, py), (2, 0)) - 4) < 1e-6 \
            or abs(angle_between((0, 1), (-px, -py)) - PARAMS0.theta) < 1e-6 \
            or abs(angle_between((0, 1), (2 - px, -py)) - PARAMS0.theta) < 1e-6


@settings(max_examples=200)
@given(st.floats(-4, 6), st.floats(-6, 1))
def test_observer_lies_in_frustum(px, py):
    if efficiently_observes((px, py), FLAT, PARAMS0):
        assert py < 0
        assert math.dist((px, py), FLAT.a) <= 4 + 1e-9
        assert math.dist((px, py), FLAT.b) <= 4 + 1e-9
