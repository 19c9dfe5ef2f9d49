"""Piecewise-linear skylines ("jigsaws") and the two-sided regions they bound.

A jigsaw is a continuous piecewise-linear function from a closed bounded
interval to the nonnegative reals, stored as its breakpoints.  A double
jigsaw pairs an upper and a lower jigsaw over a common interval around a
horizontal *equator* line and denotes the closed region between them.
Diamonds are the seed regions; larger regions grow by absorbing diamonds
pole-by-pole, which keeps every region vertically convex and keeps all
boundary slopes bounded by the steepest absorbed diamond.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

from ..rationals import R2, pt, seg_seg_dist2, segments_intersect
from .shapes import DiamondSpec

Rat = Union[int, Fraction]
Breakpoint = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class Jigsaw:
    """Breakpoint representation of a nonnegative piecewise-linear function.

    ``breakpoints`` is a nonempty tuple of ``(x, y)`` pairs with strictly
    increasing ``x`` and ``y >= 0``; the function is affine between
    consecutive breakpoints and undefined outside ``[x_first, x_last]``.
    """

    breakpoints: Tuple[Breakpoint, ...]
    _xs: Tuple[Fraction, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bps = tuple((Fraction(x), Fraction(y)) for x, y in self.breakpoints)
        if not bps:
            raise ValueError("jigsaw needs at least one breakpoint")
        xs = tuple(x for x, _ in bps)
        for a, b in zip(xs, xs[1:]):
            if not a < b:
                raise ValueError("breakpoint x-coordinates must strictly increase")
        if any(y < 0 for _, y in bps):
            raise ValueError("jigsaw heights must be nonnegative")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "_xs", xs)

    @property
    def lo(self) -> Fraction:
        return self.breakpoints[0][0]

    @property
    def hi(self) -> Fraction:
        return self.breakpoints[-1][0]

    @property
    def support(self) -> Tuple[Fraction, Fraction]:
        return (self.lo, self.hi)

    @property
    def max_height(self) -> Fraction:
        return max(y for _, y in self.breakpoints)

    def __call__(self, x: Rat) -> Fraction:
        x = Fraction(x)
        if x < self.lo or x > self.hi:
            raise ValueError(f"{x} outside jigsaw support [{self.lo}, {self.hi}]")
        i = bisect.bisect_right(self._xs, x)
        if i == len(self._xs):
            return self.breakpoints[-1][1]
        x0, y0 = self.breakpoints[i - 1]
        x1, y1 = self.breakpoints[i]
        if x == x0:
            return y0
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def eval0(self, x: Rat) -> Fraction:
        """Evaluate the zero-extension of the jigsaw to the whole line."""
        x = Fraction(x)
        if x < self.lo or x > self.hi:
            return Fraction(0)
        return self(x)

    def slope_bound(self) -> Fraction:
        """Largest absolute slope over all segments (0 for a single point)."""
        best = Fraction(0)
        for (x0, y0), (x1, y1) in zip(self.breakpoints, self.breakpoints[1:]):
            s = abs((y1 - y0) / (x1 - x0))
            if s > best:
                best = s
        return best

    def padded(self, lo: Rat, hi: Rat) -> "Jigsaw":
        """Extend the support to ``[lo, hi]`` with zero height.

        Only legal when each side being extended already ends at height 0,
        so the result stays continuous as a function on the larger interval.
        """
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > self.lo or hi < self.hi:
            raise ValueError("padded support must contain the current one")
        bps = list(self.breakpoints)
        if lo < self.lo:
            if bps[0][1] != 0:
                raise ValueError("cannot zero-pad a jigsaw with a raised left endpoint")
            bps.insert(0, (lo, Fraction(0)))
        if hi > self.hi:
            if bps[-1][1] != 0:
                raise ValueError("cannot zero-pad a jigsaw with a raised right endpoint")
            bps.append((hi, Fraction(0)))
        return Jigsaw(tuple(bps))


def tri_jigsaw(peak: R2, alpha: Rat) -> Jigsaw:
    """Triangle profile with apex ``peak`` and flank slopes ``±alpha``.

    Supported on ``[x0 - y0/alpha, x0 + y0/alpha]``; a zero-height peak
    degenerates to the single breakpoint ``(x0, 0)``.
    """
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError("slope must be positive")
    x0, y0 = Fraction(peak.x), Fraction(peak.y)
    if y0 < 0:
        raise ValueError("peak height must be nonnegative")
    if y0 == 0:
        return Jigsaw(((x0, Fraction(0)),))
    r = y0 / alpha
    return Jigsaw(((x0 - r, Fraction(0)), (x0, y0), (x0 + r, Fraction(0))))


def _max_candidates(f: Jigsaw, g: Jigsaw, lo: Fraction, hi: Fraction):
    xs = {lo, hi}
    for j in (f, g):
        for x, _ in j.breakpoints:
            if lo <= x <= hi:
                xs.add(x)
    base = sorted(xs)
    # insert crossings of the two affine pieces inside each cell
    out = []
    for a, b in zip(base, base[1:]):
        out.append(a)
        fa, fb = f.eval0(a), f.eval0(b)
        ga, gb = g.eval0(a), g.eval0(b)
        d0, d1 = fa - ga, fb - gb
        if (d0 > 0 > d1) or (d0 < 0 < d1):
            x = a + (b - a) * d0 / (d0 - d1)
            if a < x < b:
                out.append(x)
    out.append(base[-1])
    return out


def jigsaw_max(f: Jigsaw, g: Jigsaw) -> Jigsaw:
    """Pointwise maximum of the zero-extensions, on the union interval.

    Raises if the true maximum is discontinuous, i.e. when one jigsaw stops
    at positive height strictly inside the union interval and the other
    does not cover the jump.  (All internal callers keep zero endpoint
    heights, where the maximum is always a jigsaw.)
    """
    lo = min(f.lo, g.lo)
    hi = max(f.hi, g.hi)
    for j, other in ((f, g), (g, f)):
        for e in (j.lo, j.hi):
            if lo < e < hi and j(e) > 0 and other.eval0(e) < j(e):
                raise ValueError(
                    "zero-extended maximum is discontinuous at x=%s" % e)
    xs = _max_candidates(f, g, lo, hi)
    pts = [(x, max(f.eval0(x), g.eval0(x))) for x in xs]
    # drop collinear interior points to keep the representation small
    slim: list = [pts[0]]
    for p in pts[1:]:
        while len(slim) >= 2:
            (x0, y0), (x1, y1) = slim[-2], slim[-1]
            if (y1 - y0) * (p[0] - x1) == (p[1] - y1) * (x1 - x0):
                slim.pop()
            else:
                break
        slim.append(p)
    return Jigsaw(tuple(slim))


@dataclass(frozen=True)
class DoubleJigsaw:
    """Closed region between an upper and a lower jigsaw around an equator.

    The region is ``{(x, y) : x in I, eq_y - lower(x) <= y <= eq_y + upper(x)}``
    where ``I`` is the common support of the two profiles.  ``created`` is a
    stable identity used for deterministic tie-breaking when regions compete
    as merge targets; ``provenance`` lists the absorbed diamonds in order.
    """

    eq_y: Fraction
    upper: Jigsaw
    lower: Jigsaw
    created: int = 0
    provenance: Tuple[DiamondSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "eq_y", Fraction(self.eq_y))
        if self.upper.support != self.lower.support:
            raise ValueError("upper and lower profiles must share a support interval")

    @classmethod
    def from_diamond(cls, d: DiamondSpec, created: int = 0) -> "DoubleJigsaw":
        cx, cy = d.center.x, d.center.y
        if d.h == 0:
            flat = Jigsaw(((cx - d.w / 2, Fraction(0)), (cx + d.w / 2, Fraction(0))))
            return cls(cy, flat, flat, created, (d,))
        tri = tri_jigsaw(pt(cx, d.h / 2), d.slope)
        return cls(cy, tri, tri, created, (d,))

    @property
    def support(self) -> Tuple[Fraction, Fraction]:
        return self.upper.support

    def bbox(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        lo, hi = self.support
        return (lo, self.eq_y - self.lower.max_height,
                hi, self.eq_y + self.upper.max_height)

    def top(self, x: Rat) -> Fraction:
        return self.eq_y + self.upper(x)

    def bottom(self, x: Rat) -> Fraction:
        return self.eq_y - self.lower(x)

    def contains(self, p: R2) -> bool:
        lo, hi = self.support
        if p.x < lo or p.x > hi:
            return False
        return self.bottom(p.x) <= p.y <= self.top(p.x)

    def boundary(self) -> Tuple[R2, ...]:
        """Closed boundary chain, counterclockwise, duplicates removed."""
        lo, hi = self.support
        ups = [pt(x, self.eq_y + y) for x, y in self.upper.breakpoints]
        downs = [pt(x, self.eq_y - y) for x, y in self.lower.breakpoints]
        chain = list(reversed(ups)) + downs  # hi->lo along top, lo->hi along bottom
        out = []
        for q in chain:
            if not out or out[-1] != q:
                out.append(q)
        if len(out) > 1 and out[0] == out[-1]:
            out.pop()
        return tuple(out)

    def boundary_segments(self) -> Tuple[Tuple[R2, R2], ...]:
        b = self.boundary()
        if len(b) == 1:
            return ((b[0], b[0]),)
        return tuple((b[i], b[(i + 1) % len(b)]) for i in range(len(b)))

    def slope_bound(self) -> Fraction:
        return max(self.upper.slope_bound(), self.lower.slope_bound())


def adjoin(region: DoubleJigsaw, d: DiamondSpec) -> DoubleJigsaw:
    """Absorb a diamond into a region, pole by pole.

    The upper profile rises to cover a triangle peaked at the diamond's
    north pole whenever that pole is strictly above the equator line; the
    lower profile symmetrically covers the south pole's reflection when it
    is strictly below.  Flat diamonds (h = 0) have both poles on their own
    equator and are absorbed as no-ops.
    """
    if d.h == 0:
        return DoubleJigsaw(region.eq_y, region.upper, region.lower,
                            region.created, region.provenance + (d,))
    alpha = d.slope
    upper, lower = region.upper, region.lower
    up = d.north.y - region.eq_y
    if up > 0:
        upper = jigsaw_max(upper, tri_jigsaw(pt(d.center.x, up), alpha))
    down = region.eq_y - d.south.y
    if down > 0:
        lower = jigsaw_max(lower, tri_jigsaw(pt(d.center.x, down), alpha))
    lo = min(upper.lo, lower.lo)
    hi = max(upper.hi, lower.hi)
    return DoubleJigsaw(region.eq_y, upper.padded(lo, hi), lower.padded(lo, hi),
                        region.created, region.provenance + (d,))


def _poly_segments(vertices: Sequence[R2]) -> Tuple[Tuple[R2, R2], ...]:
    n = len(vertices)
    if n == 1:
        return ((vertices[0], vertices[0]),)
    return tuple((vertices[i], vertices[(i + 1) % n]) for i in range(n))


def region_diamond_dist2(region: DoubleJigsaw, d: DiamondSpec) -> Fraction:
    """Squared Euclidean distance between a region and a diamond (0 if they meet)."""
    rlo, rby, rhi, rty = region.bbox()
    dlo, dby, dhi, dty = d.bbox()
    gx = max(dlo - rhi, rlo - dhi, Fraction(0))
    gy = max(dby - rty, rby - dty, Fraction(0))
    bbox_gap2 = gx * gx + gy * gy
    rsegs = region.boundary_segments()
    dsegs = _poly_segments(d.vertices())
    if bbox_gap2 == 0:
        if region.contains(d.center) or d.contains(region.boundary()[0]):
            return Fraction(0)
        for a, b in rsegs:
            for c, e in dsegs:
                if segments_intersect(a, b, c, e):
                    return Fraction(0)
    best: Optional[Fraction] = None
    for a, b in rsegs:
        for c, e in dsegs:
            d2 = seg_seg_dist2(a, b, c, e)
            if best is None or d2 < best:
                best = d2
                if best == 0:
                    return best
    assert best is not None
    return best


def regions_disjoint(a: DoubleJigsaw, b: DoubleJigsaw) -> bool:
    """Whether two regions are disjoint as closed sets."""
    alo, aby, ahi, aty = a.bbox()
    blo, bby, bhi, bty = b.bbox()
    if ahi < blo or bhi < alo or aty < bby or bty < aby:
        return True
    if a.contains(b.boundary()[0]) or b.contains(a.boundary()[0]):
        return False
    for p, q in a.boundary_segments():
        for r, s in b.boundary_segments():
            if segments_intersect(p, q, r, s):
                return False
    return True
