from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from aperiodic.rationals import (
    R2, convex_hull, cross, decimal_str, diameter2, dist2, dot, fmt,
    parse_fraction, pt, seg_point_dist2, seg_seg_dist2, segments_intersect,
    sqrt_lower, sqrt_upper,
)

rats = st.fractions(min_value=-50, max_value=50, max_denominator=16)
points = st.builds(pt, rats, rats)


def test_pt_coerces():
    p = pt(1, "3/2") if False else pt(1, F(3, 2))
    assert isinstance(p.x, F) and p == R2(F(1), F(3, 2))


def test_vector_ops():
    a, b = pt(2, 3), pt(-1, 4)
    assert a + b == pt(1, 7)
    assert a - b == pt(3, -1)
    assert a.scale(F(1, 2)) == pt(1, F(3, 2))
    assert dot(a, b) == 10
    assert cross(a, b) == 11
    assert dist2(a, b) == 9 + 1


def test_seg_point_dist2_projection_cases():
    a, b = pt(0, 0), pt(10, 0)
    assert seg_point_dist2(a, b, pt(5, 3)) == 9        # interior projection
    assert seg_point_dist2(a, b, pt(-3, 4)) == 25      # clamps to a
    assert seg_point_dist2(a, b, pt(13, -4)) == 25     # clamps to b
    assert seg_point_dist2(a, a, pt(3, 4)) == 25       # degenerate segment


@given(points, points, points)
def test_seg_point_dist2_below_endpoints(a, b, p):
    d = seg_point_dist2(a, b, p)
    assert d <= min(dist2(a, p), dist2(b, p))
    assert d >= 0


def test_segments_intersect_cases():
    assert segments_intersect(pt(0, 0), pt(2, 2), pt(0, 2), pt(2, 0))
    assert segments_intersect(pt(0, 0), pt(2, 0), pt(1, 0), pt(3, 0))  # collinear overlap
    assert not segments_intersect(pt(0, 0), pt(1, 0), pt(2, 0), pt(3, 0))
    assert segments_intersect(pt(0, 0), pt(2, 0), pt(2, 0), pt(2, 5))  # shared endpoint


@given(points, points, points, points)
def test_seg_seg_dist2_zero_iff_intersect(a, b, c, d):
    dd = seg_seg_dist2(a, b, c, d)
    assert (dd == 0) == segments_intersect(a, b, c, d)


def test_convex_hull_square_with_interior():
    ps = [pt(0, 0), pt(4, 0), pt(4, 4), pt(0, 4), pt(2, 2), pt(1, 3)]
    hull = convex_hull(ps)
    assert set(hull) == {pt(0, 0), pt(4, 0), pt(4, 4), pt(0, 4)}


@given(st.lists(points, min_size=1, max_size=40))
def test_diameter2_matches_bruteforce(ps):
    brute = max(dist2(a, b) for a in ps for b in ps)
    assert diameter2(ps) == brute


def test_sqrt_bounds_bracket():
    for q in (F(2), F(9), F(1, 3), F(10007, 13)):
        lo, hi = sqrt_lower(q, 6), sqrt_upper(q, 6)
        assert lo * lo <= q <= hi * hi
        assert hi - lo <= F(2, 10 ** 6)


def test_parse_fraction():
    assert parse_fraction("3/4") == F(3, 4)
    assert parse_fraction("-7") == F(-7)
    assert parse_fraction(" 10/4 ") == F(5, 2)
    assert parse_fraction("1.5") == F(3, 2)  # decimal literals are allowed
    with pytest.raises(ValueError):
        parse_fraction("one half")
    with pytest.raises(ZeroDivisionError):
        parse_fraction("1/0")


@given(rats)
def test_fmt_round_trips(q):
    assert parse_fraction(fmt(q)) == q


def test_fmt_shapes():
    assert fmt(F(5)) == "5"
    assert fmt(F(-3, 2)) == "-3/2"


def test_decimal_str():
    assert decimal_str(F(1, 2)) == "0.5"
    assert decimal_str(F(1), 4) == "1"
    # 1/3 rounded to 4 significant digits
    assert decimal_str(F(1, 3), 4) == "0.3333"
    assert decimal_str(F(-200, 3), 4) == "-66.67"
