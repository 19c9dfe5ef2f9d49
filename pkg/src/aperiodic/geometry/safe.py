"""Safe set of a leveled rectangle system, and low-slope paths inside it.

Each rectangle ``R`` is inflated to the smallest concentric diamond
containing ``2R``; the safe set is the complement of the merged hull of
those diamonds.  Horizontal travel through the safe set is provided by
``path``: a piecewise-linear graph over an interval, with slopes bounded
by the level-1 aspect ratio, threading strictly between the hull regions.

The path construction works with one-sided Lipschitz envelopes.  Every
region the path crosses above contributes its upper boundary as a floor;
every region crossed below contributes its lower boundary as a ceiling.
Floors are dilated into the widest slope-bounded function they force, the
ceiling likewise, and the path is clamped between the two with a rational
safety margin.  All arithmetic is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..rationals import R2, pt, segments_intersect
from .hull import Hull, build_hull
from .jigsaw import DoubleJigsaw
from .shapes import RectSpec, diamond_of_rect, scale_about_center

Rat = Union[int, Fraction]
PL = Tuple[Tuple[Fraction, Fraction], ...]  # breakpoints, strictly increasing x


class PathError(RuntimeError):
    """No safe path could be produced for the requested point and extent."""


# ---------------------------------------------------------------------------
# small exact piecewise-linear toolkit (functions share an explicit domain)

def _pl_const(xlo: Fraction, xhi: Fraction, y: Fraction) -> PL:
    return ((xlo, y), (xhi, y))


def _pl_eval(f: PL, x: Fraction) -> Fraction:
    if x < f[0][0] or x > f[-1][0]:
        raise ValueError("evaluation outside domain")
    for (x0, y0), (x1, y1) in zip(f, f[1:]):
        if x0 <= x <= x1:
            if x == x0:
                return y0
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    return f[-1][1]


def _pl_compact(points: List[Tuple[Fraction, Fraction]]) -> PL:
    slim: List[Tuple[Fraction, Fraction]] = []
    for p in points:
        if slim and slim[-1][0] == p[0]:
            continue
        while len(slim) >= 2:
            (x0, y0), (x1, y1) = slim[-2], slim[-1]
            if (y1 - y0) * (p[0] - x1) == (p[1] - y1) * (x1 - x0):
                slim.pop()
            else:
                break
        slim.append(p)
    return tuple(slim)


def _pl_combine(f: PL, g: PL, use_max: bool) -> PL:
    xs = sorted({x for x, _ in f} | {x for x, _ in g})
    pts: List[Tuple[Fraction, Fraction]] = []
    prev: Optional[Fraction] = None
    for a, b in zip(xs, xs[1:]):
        fa, ga = _pl_eval(f, a), _pl_eval(g, a)
        fb, gb = _pl_eval(f, b), _pl_eval(g, b)
        pts.append((a, max(fa, ga) if use_max else min(fa, ga)))
        d0, d1 = fa - ga, fb - gb
        if (d0 > 0 > d1) or (d0 < 0 < d1):
            x = a + (b - a) * d0 / (d0 - d1)
            if a < x < b:
                y = _pl_eval(f, x)
                pts.append((x, y))
    xb = xs[-1]
    fb, gb = _pl_eval(f, xb), _pl_eval(g, xb)
    pts.append((xb, max(fb, gb) if use_max else min(fb, gb)))
    return _pl_compact(pts)


def _pl_offset(f: PL, c: Fraction) -> PL:
    return tuple((x, y + c) for x, y in f)


def _pl_min_vertex(f: PL) -> Tuple[Fraction, Fraction]:
    best = f[0]
    for p in f[1:]:
        if p[1] < best[1]:
            best = p
    return best


# ---------------------------------------------------------------------------
# slope-bounded dilations of region boundaries
#
# Passing over a region forces the path to clear its top across the whole
# support and to approach or leave it no steeper than alpha, so the floor a
# region forces is its top profile extended beyond the support with slope
# -alpha flanks.  (Tents through the breakpoints alone are NOT enough: on a
# top segment flatter than alpha the tents from its endpoints dip below the
# segment, letting a "floor" cut through the region.)


def _ext_top(el: DoubleJigsaw, alpha: Fraction, x: Fraction) -> Fraction:
    lo, hi = el.support
    if x < lo:
        return el.top(lo) - alpha * (lo - x)
    if x > hi:
        return el.top(hi) - alpha * (x - hi)
    return el.top(x)


def _ext_bottom(el: DoubleJigsaw, alpha: Fraction, x: Fraction) -> Fraction:
    lo, hi = el.support
    if x < lo:
        return el.bottom(lo) + alpha * (lo - x)
    if x > hi:
        return el.bottom(hi) + alpha * (x - hi)
    return el.bottom(x)


def _dilated_pl(el: DoubleJigsaw, alpha: Fraction, xlo: Fraction, xhi: Fraction,
                top: bool) -> PL:
    """The forced floor (``top``) or ceiling of one region on ``[xlo, xhi]``."""
    lo, hi = el.support
    prof = el.upper if top else el.lower
    f = _ext_top if top else _ext_bottom
    xs = [x for x, _ in prof.breakpoints if xlo < x < xhi]
    for edge in (lo, hi):
        if xlo < edge < xhi and edge not in xs:
            xs.append(edge)
    pts = [(x, f(el, alpha, x)) for x in sorted(set(xs))]
    return _pl_compact([(xlo, f(el, alpha, xlo))] + pts + [(xhi, f(el, alpha, xhi))])


def _envelope(els: Sequence[DoubleJigsaw], alpha: Fraction,
              xlo: Fraction, xhi: Fraction, top: bool) -> PL:
    out: Optional[PL] = None
    for el in els:
        piece = _dilated_pl(el, alpha, xlo, xhi, top)
        out = piece if out is None else _pl_combine(out, piece, use_max=top)
    assert out is not None
    return out


# ---------------------------------------------------------------------------

OVER = "over"
UNDER = "under"


@dataclass(frozen=True)
class SafeSystem:
    """Hull-complement oracle for a leveled family of rectangles."""

    rect_families: Tuple[Tuple[RectSpec, ...], ...]
    dims: Tuple[Tuple[Fraction, Fraction], ...]
    hull: Hull

    @classmethod
    def build(cls, rect_families: Sequence[Sequence[RectSpec]],
              dims: Optional[Sequence[Tuple[Rat, Rat]]] = None) -> "SafeSystem":
        fams = tuple(tuple(f) for f in rect_families)
        if dims is None:
            rdims = []
            for n, fam in enumerate(fams, start=1):
                if not fam:
                    raise ValueError(f"level {n} family is empty and no dims were given")
                rdims.append((fam[0].w, fam[0].h))
            dims = rdims
        rdims = tuple((Fraction(w), Fraction(h)) for w, h in dims)
        diamond_families = [
            [diamond_of_rect(scale_about_center(r, 2)) for r in fam]
            for fam in fams
        ]
        ddims = [(4 * w, 4 * h) for w, h in rdims]
        hull = build_hull(diamond_families, ddims)
        return cls(fams, rdims, hull)

    @property
    def levels(self) -> int:
        return len(self.dims)

    @property
    def slope_limit(self) -> Fraction:
        """Steepest allowed path slope: the level-1 aspect ratio."""
        if not self.dims:
            return Fraction(1)
        w, h = self.dims[0]
        return h / w

    def contains(self, p: R2) -> bool:
        return not self.hull.contains(p)

    def vertical_gap(self, x: Rat, y0: Rat, y1: Rat) -> Optional[Fraction]:
        """A ``y`` in ``[y0, y1]`` with ``(x, y)`` safe, or None if fully covered."""
        x, y0, y1 = Fraction(x), Fraction(y0), Fraction(y1)
        if y0 > y1:
            raise ValueError("empty probe interval")
        spans = []
        for el in self.hull.elements:
            lo, hi = el.support
            if lo <= x <= hi:
                spans.append((el.bottom(x), el.top(x)))
        spans.sort()
        merged: List[Tuple[Fraction, Fraction]] = []
        for b, t in spans:
            if merged and b <= merged[-1][1]:
                if t > merged[-1][1]:
                    merged[-1] = (merged[-1][0], t)
            else:
                merged.append((b, t))
        # walk the open complement intervals, clipped to the probe
        free: List[Tuple[Optional[Fraction], Optional[Fraction]]] = []
        prev: Optional[Fraction] = None
        for b, t in merged:
            free.append((prev, b))
            prev = t
        free.append((prev, None))
        for lo_open, hi_open in free:
            lo, lo_strict = (y0, False)
            if lo_open is not None and lo_open >= y0:
                lo, lo_strict = lo_open, True
            hi, hi_strict = (y1, False)
            if hi_open is not None and hi_open <= y1:
                hi, hi_strict = hi_open, True
            if lo < hi:
                return (lo + hi) / 2
            if lo == hi and not lo_strict and not hi_strict:
                return lo
        return None

    # -- path construction ---------------------------------------------------

    def path(self, p: R2, extent: Rat) -> Tuple[R2, ...]:
        """Safe polygonal graph through ``p`` spanning ``[p.x - extent, p.x + extent]``.

        Slopes never exceed :attr:`slope_limit`; the path avoids every hull
        region strictly.  Raises :class:`PathError` when ``p`` is not safe or
        when no side assignment around the obstacles works out.
        """
        extent = Fraction(extent)
        if extent <= 0:
            raise ValueError("extent must be positive")
        if not self.contains(p):
            raise PathError(f"({p.x}, {p.y}) is not in the safe set")
        alpha = self.slope_limit
        px, py = Fraction(p.x), Fraction(p.y)
        xlo, xhi = px - extent, px + extent

        els = [el for el in self.hull.elements
               if el.support[0] <= xhi and el.support[1] >= xlo]
        side: Dict[int, str] = {}
        forced: Dict[int, str] = {}
        for i, el in enumerate(els):
            lo, hi = el.support
            if lo <= px <= hi:
                if py > el.top(px):
                    forced[i] = OVER
                elif py < el.bottom(px):
                    forced[i] = UNDER
                else:  # pragma: no cover - contains() already rejected this
                    raise PathError("start point lies on an obstacle")
                side[i] = forced[i]
            else:
                side[i] = OVER if py >= el.eq_y else UNDER

        flipped: set = set()

        def cone_top(i: int) -> Fraction:
            """The floor value at px forced by element i when passed over."""
            return _ext_top(els[i], alpha, px)

        def cone_bottom(i: int) -> Fraction:
            return _ext_bottom(els[i], alpha, px)

        def flip(i: int, to: str) -> None:
            if i in forced or i in flipped:
                raise PathError(
                    f"no consistent over/under assignment (element {els[i].created})")
            flipped.add(i)
            side[i] = to

        for _ in range(2 * len(els) + 2):
            overs = [els[i] for i in side if side[i] == OVER]
            unders = [els[i] for i in side if side[i] == UNDER]
            floor = _envelope(overs, alpha, xlo, xhi, top=True) if overs else None
            ceil = _envelope(unders, alpha, xlo, xhi, top=False) if unders else None

            if floor is not None and _pl_eval(floor, px) >= py:
                bad = [i for i in side if side[i] == OVER and cone_top(i) >= py]
                for i in bad:
                    flip(i, UNDER)
                continue
            if ceil is not None and _pl_eval(ceil, px) <= py:
                bad = [i for i in side if side[i] == UNDER and cone_bottom(i) <= py]
                for i in bad:
                    flip(i, OVER)
                continue

            band_min: Optional[Fraction] = None
            if floor is not None and ceil is not None:
                # ceil - floor is linear between the merged breakpoints, so its
                # minimum is attained at one of them
                xs = sorted({x for x, _ in floor} | {x for x, _ in ceil})
                diff = tuple((x, _pl_eval(ceil, x) - _pl_eval(floor, x)) for x in xs)
                xstar, band_min = _pl_min_vertex(diff)
                if band_min <= 0:
                    over_hit = [i for i in side if side[i] == OVER
                                and _ext_top(els[i], alpha, xstar)
                                >= _pl_eval(floor, xstar)]
                    under_hit = [i for i in side if side[i] == UNDER
                                 and _ext_bottom(els[i], alpha, xstar)
                                 <= _pl_eval(ceil, xstar)]
                    cands = [i for i in over_hit + under_hit
                             if i not in forced and i not in flipped]
                    if not cands:
                        raise PathError("obstacle corridor pinched shut")
                    mid = lambda i: (els[i].support[0] + els[i].support[1]) / 2
                    i = max(cands, key=lambda i: (abs(mid(i) - px), i))
                    flip(i, UNDER if side[i] == OVER else OVER)
                    continue

            gaps = []
            if band_min is not None:
                gaps.append(band_min)
            if floor is not None:
                gaps.append(py - _pl_eval(floor, px))
            if ceil is not None:
                gaps.append(_pl_eval(ceil, px) - py)
            delta = min(gaps) / 4 if gaps else Fraction(1)

            core: PL = _pl_const(xlo, xhi, py)
            if ceil is not None:
                core = _pl_combine(core, _pl_offset(ceil, -delta), use_max=False)
            if floor is not None:
                core = _pl_combine(core, _pl_offset(floor, delta), use_max=True)
            path = tuple(pt(x, y) for x, y in core)
            self._verify_path(path, p, alpha, xlo, xhi)
            return path
        raise PathError("over/under assignment did not stabilize")

    def _verify_path(self, path: Sequence[R2], p: R2, alpha: Fraction,
                     xlo: Fraction, xhi: Fraction) -> None:
        if path[0].x != xlo or path[-1].x != xhi:
            raise PathError("path does not span the requested interval")
        for a, b in zip(path, path[1:]):
            if b.x <= a.x:
                raise PathError("path is not a graph over x")
            if abs(b.y - a.y) > alpha * (b.x - a.x):
                raise PathError("path exceeds the slope limit")
        f: PL = tuple((q.x, q.y) for q in path)
        if _pl_eval(f, p.x) != p.y:
            raise PathError("path misses the requested point")
        for el in self.hull.elements:
            lo, hi = el.support
            if hi < xlo or lo > xhi:
                continue
            for q in path:
                if el.contains(q):
                    raise PathError("path vertex lands on an obstacle")
            segs = el.boundary_segments()
            for a, b in zip(path, path[1:]):
                for c, d in segs:
                    if segments_intersect(a, b, c, d):
                        raise PathError("path crosses an obstacle boundary")


def safe_contains(rect_families: Sequence[Sequence[RectSpec]], p: R2,
                  dims: Optional[Sequence[Tuple[Rat, Rat]]] = None) -> bool:
    """Whether ``p`` avoids every merged region of the rectangle system."""
    return SafeSystem.build(rect_families, dims).contains(p)


def safe_path(rect_families: Sequence[Sequence[RectSpec]], p: R2, extent: Rat,
              dims: Optional[Sequence[Tuple[Rat, Rat]]] = None) -> Tuple[R2, ...]:
    """Safe slope-bounded polygonal graph through ``p``; see :meth:`SafeSystem.path`."""
    return SafeSystem.build(rect_families, dims).path(p, extent)
