import io
import math

import pytest

from coverplan.discretize import ObservationPoint
from coverplan.errors import SideUncoverable
from coverplan.geometry import Point2D, RectObject, sides_of
from coverplan.graph import build_graph

SIDE = sides_of(RectObject(0, Point2D(0, 0), 2, 2))[0]  # id 1


def two_point_graph():
    pts = [ObservationPoint(0, Point2D(-1, -3), frozenset({1})),
           ObservationPoint(1, Point2D(1, -3), frozenset({1}))]
    return build_graph(pts, [SIDE], Point2D(0, -10), 50.0)


def test_small_graph_edges():
    g = two_point_graph()
    edges = sorted(g.edges())
    coverage = [e for e in edges if 1 in e[:2]]
    assert [(u, v) for u, v, _ in coverage] == [(1, 2), (1, 3)]
    assert all(w == 25 for _, _, w in coverage)
    assert (2, 3, 2.0) in edges
    start_edges = [e for e in edges if e[0] == 0]
    assert len(start_edges) == 2
    assert len(edges) == 5


def test_coverage_weight_ignores_geometry():
    g = two_point_graph()
    assert g.weight(1, 2) == g.weight(1, 3) == 25
    assert math.dist(g.coords[1], g.coords[2]) != 25


def test_viewpoint_weight_is_euclidean():
    g = two_point_graph()
    assert g.weight(2, 0) == pytest.approx(math.dist((-1, -3), (0, -10)))


def test_no_midpoint_or_start_midpoint_edges():
    g = two_point_graph()
    assert math.isinf(g.weight(0, 1))
    W = g.dense_matrix()
    assert math.isinf(W[0, 1]) and math.isinf(W[1, 1])


def test_row_matches_dense_matrix():
    g = two_point_graph()
    W = g.dense_matrix()
    for u in range(g.n_vertices):
        assert g.row(u).tolist() == W[u].tolist()


def test_uncovered_side_is_rejected():
    other = sides_of(RectObject(0, Point2D(0, 0), 2, 2))[2]
    with pytest.raises(SideUncoverable):
        build_graph([ObservationPoint(0, Point2D(0, -3), frozenset({1}))], [SIDE, other], (0, -10), 10)


def test_dump_is_line_per_edge():
    buf = io.StringIO()
    two_point_graph().dump(buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 5
    assert lines[0].split()[:2] == ["0", "2"]
