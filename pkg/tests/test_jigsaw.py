from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from aperiodic.geometry import DiamondSpec, DoubleJigsaw, Jigsaw, adjoin, jigsaw_max, tri_jigsaw
from aperiodic.geometry.jigsaw import region_diamond_dist2, regions_disjoint
from aperiodic.rationals import pt

rats = st.fractions(min_value=-12, max_value=12, max_denominator=6)
heights = st.fractions(min_value=0, max_value=8, max_denominator=6)


@st.composite
def jigsaws(draw):
    n = draw(st.integers(1, 5))
    xs = sorted(draw(st.sets(rats, min_size=n, max_size=n)))
    ys = [draw(heights) for _ in xs]
    return Jigsaw(tuple(zip(xs, ys)))


def test_jigsaw_validation():
    with pytest.raises(ValueError):
        Jigsaw(())
    with pytest.raises(ValueError):
        Jigsaw(((0, 0), (0, 1)))  # non-increasing x
    with pytest.raises(ValueError):
        Jigsaw(((0, -1),))


def test_jigsaw_eval_interpolates():
    j = Jigsaw(((0, 0), (2, 4), (6, 0)))
    assert j(0) == 0 and j(1) == 2 and j(2) == 4 and j(4) == 2
    assert j.max_height == 4
    assert j.slope_bound() == 2
    with pytest.raises(ValueError):
        j(7)
    assert j.eval0(7) == 0


def test_tri_jigsaw():
    t = tri_jigsaw(pt(3, 2), F(1, 2))
    assert t.breakpoints == ((F(-1), F(0)), (F(3), F(2)), (F(7), F(0)))
    assert tri_jigsaw(pt(3, 0), 1).breakpoints == ((F(3), F(0)),)


@given(jigsaws(), jigsaws(), rats)
def test_jigsaw_max_is_pointwise_max(f, g, x):
    lo = min(f.lo, g.lo)
    hi = max(f.hi, g.hi)
    try:
        m = jigsaw_max(f, g)
    except ValueError:
        return  # discontinuous zero-extension: documented refusal
    assert m.support == (lo, hi)
    if lo <= x <= hi:
        assert m(x) == max(f.eval0(x), g.eval0(x))


def test_jigsaw_max_rejects_discontinuity():
    f = Jigsaw(((0, 2), (4, 2)))  # raised endpoints
    g = Jigsaw(((6, 1), (8, 1)))
    with pytest.raises(ValueError):
        jigsaw_max(f, g)


def test_padded_guards():
    j = Jigsaw(((0, 1), (2, 1)))
    with pytest.raises(ValueError):
        j.padded(-1, 3)  # raised endpoints cannot be zero-padded
    k = tri_jigsaw(pt(0, 1), 1).padded(-5, 5)
    assert k.support == (F(-5), F(5))
    assert k(-5) == 0 and k(0) == 1


# -- closed regions


def diamond(cx, cy, w, h):
    return DiamondSpec(pt(cx, cy), F(w), F(h))


def test_region_from_diamond_contains_it():
    d = diamond(2, 3, 4, 2)
    r = DoubleJigsaw.from_diamond(d)
    for v in d.vertices():
        assert r.contains(v)
    assert r.contains(d.center)
    assert not r.contains(pt(d.center.x + d.w, d.center.y))
    assert r.boundary() == (pt(4, 3), pt(2, 4), pt(0, 3), pt(2, 2))


def test_adjoin_covers_both_shapes():
    r0 = DoubleJigsaw.from_diamond(diamond(0, 0, 4, 2))
    d = diamond(3, 1, 4, 2)
    r1 = adjoin(r0, d)
    assert r1.provenance[-1] is d
    for q in (pt(0, 1), pt(0, -1), pt(3, F(3, 2)), pt(3, F(1, 2)), pt(2, 0)):
        assert r1.contains(q)
    # the absorbed diamond's spine is covered across its whole width
    for v in d.vertices():
        assert r1.contains(v) or v.y < r1.bottom(v.x)


@given(st.builds(lambda a, b, c, d: (a, b, c, d), rats, rats,
                 st.fractions(min_value=1, max_value=6, max_denominator=4),
                 st.fractions(min_value=0, max_value=4, max_denominator=4)))
def test_adjoin_preserves_equator_and_grows(args):
    cx, cy, w, h = args
    base = DoubleJigsaw.from_diamond(diamond(0, 0, 4, 2))
    d = DiamondSpec(pt(cx, cy), w, h)
    r = adjoin(base, d)
    assert r.eq_y == base.eq_y
    # monotone: everything inside the base stays inside
    for x, y in base.upper.breakpoints:
        assert r.contains(pt(x, base.eq_y + y))
    for x, y in base.lower.breakpoints:
        assert r.contains(pt(x, base.eq_y - y))
    # poles strictly past the equator end up covered; flat diamonds are
    # absorbed as no-ops, their poles coincide with their own equator
    if d.h > 0:
        if d.north.y > base.eq_y:
            assert r.contains(d.north)
        if d.south.y < base.eq_y:
            assert r.contains(d.south)


def test_region_diamond_dist2():
    r = DoubleJigsaw.from_diamond(diamond(0, 0, 4, 2))
    assert region_diamond_dist2(r, diamond(1, 0, 2, 1)) == 0
    assert region_diamond_dist2(r, diamond(7, 0, 4, 2)) == 9  # axis gap [2, 5]
    far = region_diamond_dist2(r, diamond(0, 10, 2, 2))
    assert far == 64  # apex (0, 1) to south tip (0, 9)


def test_regions_disjoint():
    a = DoubleJigsaw.from_diamond(diamond(0, 0, 4, 2))
    b = DoubleJigsaw.from_diamond(diamond(10, 0, 4, 2))
    c = DoubleJigsaw.from_diamond(diamond(3, 0, 4, 2))
    assert regions_disjoint(a, b)
    assert not regions_disjoint(a, c)
    # touching tips are not disjoint (closed sets)
    d = DoubleJigsaw.from_diamond(diamond(4, 0, 4, 2))
    assert not regions_disjoint(a, d)
