from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from aperiodic.geometry import (
    DiamondSpec, RectSpec, diamond_of_rect, is_sparse, scale_about_center,
)
from aperiodic.geometry.shapes import convex_intersect
from aperiodic.rationals import pt

rats = st.fractions(min_value=-20, max_value=20, max_denominator=8)
sizes = st.fractions(min_value=F(1, 4), max_value=10, max_denominator=8)


def test_diamond_vertices_ccw():
    d = DiamondSpec(pt(1, 2), F(4), F(2))
    assert d.vertices() == (pt(3, 2), pt(1, 3), pt(-1, 2), pt(1, 1))
    assert d.north == pt(1, 3) and d.south == pt(1, 1)


def test_flat_diamond_degenerates_to_segment():
    d = DiamondSpec(pt(0, 0), F(4), F(0))
    assert d.vertices() == (pt(-2, 0), pt(2, 0))
    assert d.contains(pt(1, 0))
    assert not d.contains(pt(1, F(1, 100)))


def test_diamond_validation():
    with pytest.raises(ValueError):
        DiamondSpec(pt(0, 0), F(0), F(1))
    with pytest.raises(ValueError):
        DiamondSpec(pt(0, 0), F(1), F(-1))
    with pytest.raises(ValueError):
        RectSpec(pt(0, 0), F(1), F(0))


@given(st.builds(DiamondSpec, st.builds(pt, rats, rats), sizes, sizes),
       st.builds(pt, rats, rats))
def test_diamond_contains_is_l1_ball(d, p):
    # |dx|/(w/2) + |dy|/(h/2) <= 1, cleared of denominators
    dx, dy = abs(p.x - d.center.x), abs(p.y - d.center.y)
    want = dx * d.h + dy * d.w <= d.w * d.h / 2
    assert d.contains(p) == want


@given(st.builds(RectSpec, st.builds(pt, rats, rats), sizes, sizes))
def test_diamond_of_rect_is_tight(r):
    d = diamond_of_rect(r)
    for v in r.vertices():
        assert d.contains(v)
    # corners sit exactly on the diamond boundary: shrinking fails
    smaller = scale_about_center(d, F(99, 100))
    assert not all(smaller.contains(v) for v in r.vertices())


def test_scale_about_center():
    r = RectSpec(pt(3, -1), F(2), F(4), level=2)
    s = scale_about_center(r, F(3, 2))
    assert (s.center, s.w, s.h, s.level) == (pt(3, -1), F(3), F(6), 2)
    with pytest.raises(ValueError):
        scale_about_center(r, 0)


def test_convex_intersect():
    a = DiamondSpec(pt(0, 0), F(2), F(2)).vertices()
    b = DiamondSpec(pt(1, 1), F(2), F(2)).vertices()
    c = DiamondSpec(pt(3, 3), F(2), F(2)).vertices()
    assert convex_intersect(a, b)
    assert not convex_intersect(a, c)
    # touching at a single point counts as intersecting (closed sets)
    d = DiamondSpec(pt(2, 0), F(2), F(2)).vertices()
    assert convex_intersect(a, d)


def test_is_sparse():
    fam = [RectSpec(pt(0, 0), F(1), F(1)), RectSpec(pt(10, 0), F(1), F(1))]
    assert is_sparse(fam, 2)
    assert not is_sparse(fam, 25)
    with pytest.raises(ValueError):
        is_sparse(fam, F(1, 2))


@given(st.lists(st.builds(RectSpec, st.builds(pt, rats, rats), sizes, sizes),
                min_size=2, max_size=5),
       st.integers(1, 6))
def test_is_sparse_matches_pairwise_dilates(fam, c):
    # definition check: every member misses every other member's c-dilate
    want = all(
        not convex_intersect(a.vertices(), scale_about_center(b, c).vertices())
        for i, a in enumerate(fam) for j, b in enumerate(fam) if i != j)
    assert is_sparse(fam, c) == want
