"""Merging leveled diamond families into disjoint jigsaw regions.

Diamonds are processed one level at a time, largest level first.  A
diamond farther than the level height from every existing region starts a
new region; otherwise it is absorbed into the closest region.  The result
is a collection of pairwise disjoint double jigsaws that covers every
input diamond while staying locally small.

All choices are deterministic: within a level, diamonds are processed in
lexicographic center order, the merge target is the region at minimal
exact squared distance, and ties go to the earliest-created region.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .jigsaw import DoubleJigsaw, adjoin, region_diamond_dist2
from .shapes import DiamondSpec, is_sparse

Dims = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class MergeEvent:
    """One processed diamond: either a fresh region or a merge into one."""

    level: int
    diamond: DiamondSpec
    action: str  # "add" | "merge"
    target: Optional[int]  # created-id of the merge target, None for adds
    before: Optional[DoubleJigsaw]
    after: DoubleJigsaw


@dataclass(frozen=True)
class Hull:
    elements: Tuple[DoubleJigsaw, ...]
    dims: Tuple[Dims, ...]
    log: Tuple[MergeEvent, ...]

    @property
    def levels(self) -> int:
        return len(self.dims)

    def element_by_id(self, created: int) -> DoubleJigsaw:
        for el in self.elements:
            if el.created == created:
                return el
        raise KeyError(created)

    def contains(self, p) -> bool:
        return any(el.contains(p) for el in self.elements)


def _resolve_dims(families: Sequence[Sequence[DiamondSpec]],
                  dims: Optional[Sequence[Dims]]) -> Tuple[Dims, ...]:
    if dims is not None:
        if len(dims) != len(families):
            raise ValueError("need one (w, h) pair per level")
        return tuple((Fraction(w), Fraction(h)) for w, h in dims)
    out = []
    for n, fam in enumerate(families, start=1):
        if not fam:
            raise ValueError(f"level {n} family is empty and no dims were given")
        out.append((fam[0].w, fam[0].h))
    return tuple(out)


def _check_family(fam: Sequence[DiamondSpec], n: int, dims: Dims) -> None:
    w, h = dims
    for d in fam:
        if (d.w, d.h) != (w, h):
            raise ValueError(
                f"level {n} diamond at {d.center} has size {d.w}x{d.h}, expected {w}x{h}")


_sort_key = lambda d: (d.center.x, d.center.y, d.w, d.h)


def build_hull(families: Sequence[Sequence[DiamondSpec]],
               dims: Optional[Sequence[Dims]] = None) -> Hull:
    """Merge the leveled families (level 1 first in ``families``) into regions.

    Levels are consumed from the largest down.  For each diamond, regions
    within vertical-scale distance ``h_n`` (squared distances compared
    exactly) compete as merge targets; none in range means the diamond
    seeds a new region.
    """
    rdims = _resolve_dims(families, dims)
    for n, fam in enumerate(families, start=1):
        _check_family(fam, n, rdims[n - 1])

    elements: List[DoubleJigsaw] = []
    log: List[MergeEvent] = []
    next_id = 0
    for n in range(len(families), 0, -1):
        h = rdims[n - 1][1]
        thresh2 = h * h
        for d in sorted(families[n - 1], key=_sort_key):
            dlo, dby, dhi, dty = d.bbox()
            best: Optional[Tuple[Fraction, int, int]] = None
            for idx, el in enumerate(elements):
                rlo, rby, rhi, rty = el.bbox()
                gx = max(dlo - rhi, rlo - dhi, Fraction(0))
                gy = max(dby - rty, rby - dty, Fraction(0))
                if gx * gx + gy * gy > thresh2:
                    continue
                d2 = region_diamond_dist2(el, d)
                if d2 > thresh2:
                    continue
                key = (d2, el.created, idx)
                if best is None or key[:2] < best[:2]:
                    best = key
            if best is None:
                el = DoubleJigsaw.from_diamond(d, created=next_id)
                next_id += 1
                elements.append(el)
                log.append(MergeEvent(n, d, "add", None, None, el))
            else:
                idx = best[2]
                before = elements[idx]
                after = adjoin(before, d)
                elements[idx] = after
                log.append(MergeEvent(n, d, "merge", before.created, before, after))
    return Hull(tuple(elements), rdims, tuple(log))


def merge_diff_bbox(event: MergeEvent) -> Tuple[Fraction, Fraction]:
    """Tight bbox (width, height) of (region growth) ∪ (processed diamond).

    For an "add" event the growth is the whole new region.  Used to check
    that each processing step is local: the returned box is expected to fit
    inside ``5 w_n × 5 h_n`` for a diamond of level ``n``.
    """
    d = event.diamond
    xlo, ylo, xhi, yhi = d.bbox()

    def stretch(x: Fraction, bottom: Fraction, top: Fraction):
        nonlocal xlo, ylo, xhi, yhi
        xlo, xhi = min(xlo, x), max(xhi, x)
        ylo, yhi = min(ylo, bottom), max(yhi, top)

    a = event.after
    if event.before is None:
        alo, aby, ahi, aty = a.bbox()
        return (max(xhi, ahi) - min(xlo, alo), max(yhi, aty) - min(ylo, aby))

    b = event.before
    blo, bhi = b.support
    xs = sorted({x for j in (a.upper, a.lower, b.upper, b.lower)
                 for x, _ in j.breakpoints})
    eq = a.eq_y
    for x in xs:
        ua, la = a.upper(x), a.lower(x)
        if x < blo or x > bhi:
            stretch(x, eq - la, eq + ua)
            continue
        ub, lb = b.upper(x), b.lower(x)
        if ua > ub:
            stretch(x, eq + ub, eq + ua)
        if la > lb:
            stretch(x, eq - la, eq - lb)
    return (xhi - xlo, yhi - ylo)


@dataclass(frozen=True)
class HypothesisReport:
    sparse_ok: Tuple[bool, ...]
    growth_ok: Tuple[bool, ...]
    slope_ok: Tuple[bool, ...]
    messages: Tuple[str, ...]

    @property
    def ok(self) -> bool:
        return all(self.sparse_ok) and all(self.growth_ok) and all(self.slope_ok)


def check_hypotheses(families: Sequence[Sequence[DiamondSpec]],
                     dims: Optional[Sequence[Dims]] = None,
                     sparsity: int = 20) -> HypothesisReport:
    """Verify the standing assumptions on a leveled diamond system.

    Each level must be ``sparsity``-sparse; each level's width and height
    must exceed ten times every smaller level's; each level's slope must be
    less than a tenth of the previous level's.
    """
    rdims = _resolve_dims(families, dims)
    msgs: List[str] = []
    sparse = []
    for n, fam in enumerate(families, start=1):
        ok = is_sparse(fam, sparsity)
        sparse.append(ok)
        if not ok:
            msgs.append(f"level {n} is not {sparsity}-sparse")
    growth = []
    slope = []
    for n in range(2, len(rdims) + 1):
        w, h = rdims[n - 1]
        wmax = max(x[0] for x in rdims[:n - 1])
        hmax = max(x[1] for x in rdims[:n - 1])
        g = w > 10 * wmax and h > 10 * hmax
        growth.append(g)
        if not g:
            msgs.append(f"level {n} dims {w}x{h} do not exceed 10x all lower levels")
        a_prev = rdims[n - 2][1] / rdims[n - 2][0]
        a_here = h / w
        s = a_here < a_prev / 10
        slope.append(s)
        if not s:
            msgs.append(f"level {n} slope {a_here} is not below a tenth of level {n - 1}")
    return HypothesisReport(tuple(sparse), tuple(growth), tuple(slope), tuple(msgs))
