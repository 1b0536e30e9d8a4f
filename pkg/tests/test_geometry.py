from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from xda.errors import OutOfRange
from xda.geometry import (
    ConvexPolygon,
    clip_convex,
    interiors_disjoint,
    line_range,
    overlap_witness,
    point_segment_dist2,
    polygon_point_dist2,
)
from xda.scalars import quad

F = Fraction
R3_OVER_2 = quad(0, 1, 2, 3)     # sqrt(3)/2


def unit_square():
    return ConvexPolygon([(F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1))])


def triangle():
    # equilateral on [0,1], the Koch open set
    return ConvexPolygon([(F(0), F(0)), (F(1), F(0)), (F(1, 2), R3_OVER_2)])


def test_orientation_normalized():
    cw = ConvexPolygon([(F(0), F(0)), (F(0), F(1)), (F(1), F(1)), (F(1), F(0))])
    assert cw.contains((F(1, 2), F(1, 2)))


def test_rejects_degenerate():
    with pytest.raises(OutOfRange):
        ConvexPolygon([(F(0), F(0)), (F(1), F(1)), (F(2), F(2))])
    with pytest.raises(OutOfRange):
        ConvexPolygon([(F(0), F(0)), (F(2), F(0)), (F(2), F(2)), (F(1), F(1, 4))])


def test_contains_boundary_vs_strict():
    sq = unit_square()
    assert sq.contains((F(0), F(1, 2)))
    assert not sq.contains((F(0), F(1, 2)), strict=True)
    assert sq.contains((F(1, 2), F(1, 2)), strict=True)
    assert not sq.contains((F(2), F(0)))


def test_contains_quadratic_vertex():
    tri = triangle()
    assert tri.contains((F(1, 2), R3_OVER_2))
    assert tri.contains((F(1, 2), R3_OVER_2 / 2), strict=True)
    assert not tri.contains((F(1, 2), R3_OVER_2 + F(1, 1000)))


def test_interiors_disjoint_touching():
    a = unit_square()
    b = ConvexPolygon([(F(1), F(0)), (F(2), F(0)), (F(2), F(1)), (F(1), F(1))])
    c = ConvexPolygon([(F(1, 2), F(1, 2)), (F(3, 2), F(1, 2)), (F(3, 2), F(3, 2)),
                       (F(1, 2), F(3, 2))])
    assert interiors_disjoint(a, b)          # share an edge only
    assert not interiors_disjoint(a, c)
    assert overlap_witness(a, b) is None
    w = overlap_witness(a, c)
    assert w is not None
    assert a.contains(w, strict=True) and c.contains(w, strict=True)


def test_clip_convex_square_overlap():
    a = unit_square()
    c = ConvexPolygon([(F(1, 2), F(1, 2)), (F(3, 2), F(1, 2)), (F(3, 2), F(3, 2)),
                       (F(1, 2), F(3, 2))])
    pts = clip_convex(a, c)
    assert sorted(pts) == [(F(1, 2), F(1, 2)), (F(1, 2), F(1)), (F(1), F(1, 2)),
                           (F(1), F(1))]


def test_contains_polygon():
    outer = unit_square()
    inner = ConvexPolygon([(F(1, 4), F(1, 4)), (F(3, 4), F(1, 4)), (F(1, 2), F(3, 4))])
    assert outer.contains_polygon(inner)
    assert not inner.contains_polygon(outer)


def test_line_range_horizontal_through_triangle():
    tri = triangle()
    # the x-axis meets the closed triangle in [0, 1]
    r = line_range(tri, (F(0), F(0)), (F(1), F(0)))
    assert r == (F(0), F(1))
    # a line above the apex misses
    assert line_range(tri, (F(0), F(1)), (F(1), F(0))) is None
    # vertical line through x = 1/2 spans [0, sqrt(3)/2]
    lo, hi = line_range(tri, (F(1, 2), F(0)), (F(0), F(1)))
    assert lo == 0 and hi == R3_OVER_2


def test_diameter_and_centroid():
    sq = unit_square()
    assert sq.diameter_squared() == F(2)
    assert sq.centroid() == (F(1, 2), F(1, 2))


def test_point_segment_and_polygon_distance():
    assert point_segment_dist2((F(0), F(1)), (F(-1), F(0)), (F(1), F(0))) == F(1)
    assert point_segment_dist2((F(2), F(1)), (F(-1), F(0)), (F(1), F(0))) == F(2)
    sq = unit_square()
    assert polygon_point_dist2(sq, (F(1, 2), F(1, 2))) == F(0)
    assert polygon_point_dist2(sq, (F(2), F(1, 2))) == F(1)
    assert polygon_point_dist2(sq, (F(2), F(2))) == F(2)


coord = st.fractions(min_value=-5, max_value=5)


@given(coord, coord, coord, coord, coord, coord)
def test_clip_result_inside_both(ax, ay, w, px, py, s):
    if w <= 0 or s <= 0:
        return
    a = ConvexPolygon([(ax, ay), (ax + w, ay), (ax + w, ay + w), (ax, ay + w)])
    b = ConvexPolygon([(px, py), (px + s, py), (px + s, py + s), (px, py + s)])
    for v in clip_convex(a, b):
        assert a.contains(v) and b.contains(v)
    if overlap_witness(a, b) is not None:
        assert not interiors_disjoint(a, b)
