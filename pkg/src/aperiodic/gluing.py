"""Merging two certified configurations along a region boundary.

Given configurations ``base`` and ``patch`` over the same profile, a finite
simply connected set of sites is carved out of the base plane and re-sourced
from the patch; a moat of undetermined sites is opened between the two
regions so that no symbol of either source is ever rewritten.  The joint
certificate is rebuilt in four sweeps:

  deep     -- low-level frames sitting far inside either region are copied,
  keep     -- every base frame at or above the threshold level is copied,
  rebuild  -- frames straddling the moat are rebuilt from their centers,
              with fresh witnesses placed inside the gap,
  repair   -- coverage holes left by dropped frames are patched by sliding
              a donor frame toward the gap and rebuilding it there.

Witnesses whose escape paths meet the gap are relocated to the path point
inside the gap nearest their frame's center, and their faces are re-written
at the new anchors; everything else survives verbatim.  After every
admission the full certificate validator must pass, so a finished run is
correct by construction and the final report only re-confirms it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import (Dict, FrozenSet, Iterable, List, Optional, Sequence, Set,
                    Tuple)

from . import game
from .certificate import (HEADS, TAILS, Box, Certificate, CertificateError,
                          CompatReport, ConfigBuilder, Configuration,
                          DoubleWriteError, FindRadialError, Frame, Profile,
                          ValidationReport, Window, Witness, compatible,
                          find_radial_rects, obstacle_family, perp, round_site,
                          search_unorientable_split, sigma_of_point,
                          validate_certificate, witness_component,
                          witness_is_safe)
from .geometry import PathError
from .rationals import R2, diameter2, dist2, dot, fmt, pt

Site = Tuple[int, int]
_F = Fraction

__all__ = [
    "GlueError", "RegionSetup", "StepEvent", "GlueCheck", "GlueReport",
    "GlueResult", "make_regions", "glue",
]

# integer offsets at euclidean distance <= 3: dilating the patch by these
# produces every site whose open unit square can meet the inflated patch zone
_MOAT_OFFSETS = tuple((dx, dy)
                      for dx in range(-3, 4)
                      for dy in range(-3, 4)
                      if dx * dx + dy * dy <= 9)

_PHASES = ("deep", "keep", "rebuild", "repair")


class GlueError(RuntimeError):
    """A glue run aborted; carries whatever event log had accumulated."""

    def __init__(self, msg: str, events: Sequence["StepEvent"] = (),
                 certificate: Optional[Certificate] = None):
        super().__init__(msg)
        self.events = tuple(events)
        self.certificate = certificate


class _SkipFrame(Exception):
    # internal: abandon the current frame admission with a diagnostic
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class StepEvent:
    """One line of the glue log: what a sweep did to one frame."""

    step: str
    action: str
    level: int
    source: str
    frame_id: int
    detail: str = ""

    def render(self) -> str:
        if self.action == "phase":
            return f"[{self.step}] {self.detail}"
        head = f"[{self.step}] level {self.level} {self.source}#{self.frame_id} {self.action}"
        return head + (f": {self.detail}" if self.detail else "")


def _open_sites(v: Fraction) -> range:
    """Integers in the open interval (v - 1, v + 1)."""
    return range(math.floor(v - 1) + 1, math.ceil(v + 1))


@dataclass(frozen=True)
class RegionSetup:
    """Site partition around a glued-in patch, plus the real-plane gap tests.

    Sites split three ways: the ``patch`` itself, the ``moat`` of
    undetermined sites opened around it (euclidean distance at most 3, with
    enclosed pockets absorbed), and the outside, which keeps the base
    configuration.  The *gap* is the set of real points farther than
    sup-distance 1 from every determined site; relocated witnesses and the
    rebuilt frames' fresh witnesses all land there.

    ``threshold`` is the first level whose frame disks dwarf the inflated
    patch (diameter below a tenth of the radius); at and above it the base
    certificate survives wholesale.
    """

    patch: FrozenSet[Site]
    moat: FrozenSet[Site]
    zone: FrozenSet[Site]            # patch | moat
    threshold: int
    levels: int
    zone_diameter2: Fraction         # sup diameter^2 of the inflated patch
    bbox_patch: Tuple[int, int, int, int]
    bbox_moat: Tuple[int, int, int, int]
    bbox_zone: Tuple[int, int, int, int]
    _near_patch: Tuple[Site, ...] = field(repr=False)   # non-patch sites near its bbox
    _gap_cells: Optional[FrozenSet[Tuple[int, int]]] = field(
        default=None, repr=False, compare=False)

    # -- site classification -------------------------------------------------

    def is_patch(self, s: Site) -> bool:
        return s in self.patch

    def is_moat(self, s: Site) -> bool:
        return s in self.moat

    def is_outside(self, s: Site) -> bool:
        return s not in self.zone

    # -- real-plane tests ----------------------------------------------------

    def gap_contains(self, q: R2) -> bool:
        """True iff every site within open sup-distance 1 of q is undetermined."""
        for sx in _open_sites(q.x):
            for sy in _open_sites(q.y):
                if (sx, sy) not in self.moat:
                    return False
        return True

    def deeper_than(self, q: R2, depth: Fraction, source: str) -> bool:
        """Sound one-sided test that q lies deeper than ``depth`` inside the
        zone belonging to ``source`` ("base" or "patch").

        Works through site distances: a true answer guarantees the real
        boundary of the region is farther than ``depth``; a false answer may
        be off by less than one site, which callers absorb by widening the
        band they classify into.
        """
        pad = depth + _F(3, 4)
        pad2 = pad * pad
        if source == "base":
            bx0, by0, bx1, by1 = self.bbox_zone
            ddx = max(_F(bx0) - q.x, _F(0), q.x - bx1)
            ddy = max(_F(by0) - q.y, _F(0), q.y - by1)
            if ddx * ddx + ddy * ddy > pad2:
                return True
            for (sx, sy) in self.zone:
                if dist2(q, pt(sx, sy)) <= pad2:
                    return False
            return True
        if source != "patch":
            raise ValueError(f"unknown source {source!r}")
        x0, y0, x1, y1 = self.bbox_patch
        if not (q.x - (x0 - 1) > pad and (x1 + 1) - q.x > pad
                and q.y - (y0 - 1) > pad and (y1 + 1) - q.y > pad):
            return False
        for (sx, sy) in self._near_patch:
            if dist2(q, pt(sx, sy)) <= pad2:
                return False
        return True

    # -- gap carrier ----------------------------------------------------------

    def gap_cells(self) -> FrozenSet[Tuple[int, int]]:
        """Quarter-unit cells [i/4,(i+1)/4] x [j/4,(j+1)/4] wholly in the gap.

        A closed cell lies in the gap exactly when every site within open
        sup-distance 1 of some cell point -- i.e. with 4*sx in [i-3, i+4] and
        likewise for sy -- is undetermined.  Computed once, lazily.
        """
        if self._gap_cells is None:
            x0, y0, x1, y1 = self.bbox_moat
            moat = self.moat
            cells = []
            for i in range(4 * x0 - 4, 4 * x1 + 5):
                cols = range(-((3 - i) // 4), (i + 4) // 4 + 1)
                if cols.start < x0 or cols.stop - 1 > x1:
                    continue
                for j in range(4 * y0 - 4, 4 * y1 + 5):
                    rows = range(-((3 - j) // 4), (j + 4) // 4 + 1)
                    if rows.start < y0 or rows.stop - 1 > y1:
                        continue
                    if all((cx, cy) in moat for cx in cols for cy in rows):
                        cells.append((i, j))
            object.__setattr__(self, "_gap_cells", frozenset(cells))
        return self._gap_cells

    def closest_gap_point(self, q: R2) -> Optional[Tuple[R2, Fraction]]:
        """Nearest point of the gap carrier to q with its squared distance."""
        best: Optional[Tuple[R2, Fraction]] = None
        for (i, j) in sorted(self.gap_cells()):
            cx = min(max(q.x, _F(i, 4)), _F(i + 1, 4))
            cy = min(max(q.y, _F(j, 4)), _F(j + 1, 4))
            d2 = (q.x - cx) ** 2 + (q.y - cy) ** 2
            if best is None or d2 < best[1]:
                best = (pt(cx, cy), d2)
        return best

    def summary(self) -> str:
        return (f"patch {len(self.patch)} sites, moat {len(self.moat)}, "
                f"inflated diameter^2 {fmt(self.zone_diameter2)}, "
                f"threshold level {self.threshold} of {self.levels}")


def _bbox(sites: Iterable[Site]) -> Tuple[int, int, int, int]:
    xs = [s[0] for s in sites]
    ys = [s[1] for s in sites]
    return (min(xs), min(ys), max(xs), max(ys))


def make_regions(patch_sites: Iterable[Site], p: Profile,
                 window: Optional[Window] = None,
                 threshold_override: Optional[int] = None) -> RegionSetup:
    """Partition the plane around a patch and fix the rebuild threshold.

    The patch must be a nonempty, finite, 4-connected, hole-free set of
    sites (and inside ``window`` when one is given).  A moat of undetermined
    sites at euclidean distance <= 3 is opened around it, enclosed pockets of
    the complement are absorbed into the moat, and the first level whose
    disks dwarf the inflated patch becomes the threshold.
    ``threshold_override`` forces the threshold (1 .. levels+1) for testing
    the sweeps on small instances.
    """
    sites = sorted({(int(s[0]), int(s[1])) for s in patch_sites})
    if not sites:
        raise GlueError("the patch is empty")
    patch = frozenset(sites)
    if window is not None:
        for s in sites:
            if not window.contains_site(s):
                raise GlueError(f"patch site {s} lies outside the window")

    # 4-connected?
    seen = {sites[0]}
    stack = [sites[0]]
    while stack:
        (x, y) = stack.pop()
        for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if nb in patch and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    if len(seen) != len(sites):
        raise GlueError("the patch is not 4-connected")

    # hole-free?  flood the complement (8-adjacency) inward from the border
    # of the inflated bounding box; any unreachable complement site is a hole.
    px0, py0, px1, py1 = _bbox(sites)
    comp = {(x, y)
            for x in range(px0 - 1, px1 + 2)
            for y in range(py0 - 1, py1 + 2)
            if (x, y) not in patch}
    border = [s for s in comp
              if s[0] in (px0 - 1, px1 + 1) or s[1] in (py0 - 1, py1 + 1)]
    reached = set(border)
    stack = list(border)
    while stack:
        (x, y) = stack.pop()
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                nb = (x + dx, y + dy)
                if nb in comp and nb not in reached:
                    reached.add(nb)
                    stack.append(nb)
    if len(reached) != len(comp):
        raise GlueError("the patch is not simply connected (it has holes)")

    near = {(x + dx, y + dy) for (x, y) in sites for (dx, dy) in _MOAT_OFFSETS}
    nx0, ny0, nx1, ny1 = _bbox(near)
    # absorb pockets: complement components (4-adjacency) of the dilation
    # that cannot reach the border ring of its inflated bounding box
    rect = [(x, y)
            for x in range(nx0 - 1, nx1 + 2)
            for y in range(ny0 - 1, ny1 + 2)
            if (x, y) not in near]
    rect_set = set(rect)
    border = [s for s in rect
              if s[0] in (nx0 - 1, nx1 + 1) or s[1] in (ny0 - 1, ny1 + 1)]
    outside = set(border)
    stack = list(border)
    while stack:
        (x, y) = stack.pop()
        for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if nb in rect_set and nb not in outside:
                outside.add(nb)
                stack.append(nb)
    pockets = rect_set - outside
    zone = frozenset(near | pockets)
    for (x, y) in sites:            # moat really separates: distance > 3 outside
        for (dx, dy) in _MOAT_OFFSETS:
            if (x + dx, y + dy) not in zone:
                raise GlueError("internal: moat construction failed")
    moat = frozenset(zone - patch)

    # sup diameter^2 of the union of open unit squares around patch sites:
    # attained in the closure at square corners, i.e. (|dx|+2)^2 + (|dy|+2)^2
    # over site pairs; site pairs realizing the max lie on the convex hull,
    # and for small patches the direct scan is cheap enough.
    zd2 = _F(0)
    for i, (ax, ay) in enumerate(sites):
        for (bx, by) in sites[i:]:
            cand = (_F(abs(ax - bx) + 2)) ** 2 + (_F(abs(ay - by) + 2)) ** 2
            if cand > zd2:
                zd2 = cand
    if threshold_override is not None:
        if not 1 <= threshold_override <= p.levels + 1:
            raise GlueError(f"threshold override {threshold_override} out of range")
        threshold = threshold_override
    else:
        threshold = p.levels + 1
        for n in range(1, p.levels + 1):
            if zd2 < (p.radius(n) / 10) ** 2:
                threshold = n
                break

    near_patch = tuple(sorted(
        (x, y)
        for x in range(px0 - 2, px1 + 3)
        for y in range(py0 - 2, py1 + 3)
        if (x, y) not in patch))
    setup = RegionSetup(patch=patch, moat=moat, zone=zone,
                        threshold=threshold, levels=p.levels,
                        zone_diameter2=zd2, bbox_patch=(px0, py0, px1, py1),
                        bbox_moat=_bbox(moat), bbox_zone=_bbox(zone),
                        _near_patch=near_patch)
    # the site two rows above the patch top is its own sup-ball, sits in the
    # moat, and witnesses that the gap is never empty
    top = max(sites, key=lambda s: (s[1], s[0]))
    probe = pt(top[0], top[1] + 2)
    if not setup.gap_contains(probe):
        raise GlueError("internal: expected gap point missing")
    return setup


# ---------------------------------------------------------------------------
# exact gap intersection along a segment


def _segment_gap_pieces(a: R2, b: R2,
                        setup: RegionSetup) -> List[Tuple[Fraction, Fraction]]:
    """Closed t-intervals of [0,1] along a->b lying inside the gap.

    Pieces may be degenerate (single points).  Exact: a point is in the gap
    iff no determined site is within open sup-distance 1, and each such site
    excludes an open t-interval which is subtracted from the clipped range.
    """
    x0, y0, x1, y1 = setup.bbox_moat
    if a == b:
        return [(_F(0), _F(0))] if setup.gap_contains(a) else []
    dx, dy = b.x - a.x, b.y - a.y
    # clip to the inflated moat bbox; only there can gap points exist
    t0, t1 = _F(0), _F(1)
    for dp, lo, hi in ((dx, x0 - 1 - a.x, x1 + 1 - a.x),
                       (dy, y0 - 1 - a.y, y1 + 1 - a.y)):
        if dp == 0:
            if lo > 0 or hi < 0:
                return []
            continue
        ta, tb = lo / dp, hi / dp
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
        if t0 > t1:
            return []
    xa, xb = a.x + dx * t0, a.x + dx * t1
    ya, yb = a.y + dy * t0, a.y + dy * t1
    minx, maxx = min(xa, xb), max(xa, xb)
    miny, maxy = min(ya, yb), max(ya, yb)

    blocks: List[Tuple[Fraction, Fraction]] = []
    for sx in range(math.floor(minx - 1) + 1, math.ceil(maxx + 1)):
        for sy in range(math.floor(miny - 1) + 1, math.ceil(maxy + 1)):
            if (sx, sy) in setup.moat:
                continue
            lo_t, hi_t = t0 - 1, t1 + 1        # sentinels wider than the range
            empty = False
            for dp, org, sv in ((dx, a.x, sx), (dy, a.y, sy)):
                if dp == 0:
                    if abs(org - sv) >= 1:
                        empty = True
                        break
                    continue
                ia, ib = (sv - 1 - org) / dp, (sv + 1 - org) / dp
                if ia > ib:
                    ia, ib = ib, ia
                lo_t = max(lo_t, ia)
                hi_t = min(hi_t, ib)
                if lo_t >= hi_t:
                    empty = True
                    break
            if not empty and hi_t > t0 and lo_t < t1:
                blocks.append((lo_t, hi_t))
    blocks.sort()
    merged: List[List[Fraction]] = []
    for lo, hi in blocks:
        # strict overlap merges; touching endpoints stay split because the
        # shared endpoint itself is unblocked (the intervals are open)
        if merged and lo < merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    pieces: List[Tuple[Fraction, Fraction]] = []
    cur = t0
    for lo, hi in merged:
        if hi <= cur:
            continue
        if lo > t1:
            break
        if lo >= cur:
            pieces.append((cur, min(lo, t1)))
        cur = hi
        if cur > t1:
            break
    if cur <= t1:
        pieces.append((cur, t1))
    return pieces


# ---------------------------------------------------------------------------
# gap carrier cells -> components -> boundary polylines


def _cell_components(cells: Sequence[Tuple[int, int]]) -> List[List[Tuple[int, int]]]:
    cset = set(cells)
    seen: Set[Tuple[int, int]] = set()
    comps: List[List[Tuple[int, int]]] = []
    for c in sorted(cells):
        if c in seen:
            continue
        comp = []
        stack = [c]
        seen.add(c)
        while stack:
            (i, j) = stack.pop()
            comp.append((i, j))
            for nb in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
                if nb in cset and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        comps.append(sorted(comp))
    return comps


def _boundary_loop(cells: Sequence[Tuple[int, int]]) -> List[R2]:
    """Longest closed boundary loop of a cell component, in plane coords.

    Boundary edges are the grid edges used by exactly one cell; walking them
    from the smallest edge with smallest-neighbor preference yields closed
    loops, the longest of which is the outer boundary.  Collinear runs are
    compacted.
    """
    edge_count: Dict[Tuple[Tuple[int, int], Tuple[int, int]], int] = {}
    for (i, j) in cells:
        for e in (((i, j), (i + 1, j)),
                  ((i, j + 1), (i + 1, j + 1)),
                  ((i, j), (i, j + 1)),
                  ((i + 1, j), (i + 1, j + 1))):
            edge_count[e] = edge_count.get(e, 0) + 1
    pool = {e for e, cnt in edge_count.items() if cnt == 1}
    adj: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
    for (va, vb) in pool:
        adj.setdefault(va, []).append(vb)
        adj.setdefault(vb, []).append(va)
    for v in adj:
        adj[v].sort()
    loops: List[List[Tuple[int, int]]] = []
    while pool:
        first = min(pool)
        pool.discard(first)
        loop = [first[0], first[1]]
        while loop[-1] != loop[0]:
            cur = loop[-1]
            nxt = None
            for nb in adj[cur]:
                e = (cur, nb) if cur < nb else (nb, cur)
                if e in pool:
                    nxt = nb
                    pool.discard(e)
                    break
            if nxt is None:
                raise _SkipFrame("gap boundary walk hit an open chain")
            loop.append(nxt)
        loops.append(loop)
    best = max(loops, key=len)
    m = len(best) - 1                      # best[0] == best[-1]
    corners: List[Tuple[int, int]] = []
    for k in range(m):
        prev, cur, nxt = best[(k - 1) % m], best[k], best[(k + 1) % m]
        if (prev[0] == cur[0] == nxt[0]) or (prev[1] == cur[1] == nxt[1]):
            continue
        corners.append(cur)
    if len(corners) < 4:
        raise _SkipFrame("degenerate gap boundary")
    corners.append(corners[0])
    return [pt(_F(i, 4), _F(j, 4)) for (i, j) in corners]


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class GlueCheck:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class GlueReport:
    """Verification summary of a finished glue run."""

    checks: Tuple[GlueCheck, ...]
    validation: ValidationReport
    compat: CompatReport
    admitted: Tuple[Tuple[str, int], ...]
    skips: int
    relocations: int
    shares: int
    writes: int
    write_attempts: int
    double_writes: int

    @property
    def ok(self) -> bool:
        return (all(c.ok for c in self.checks)
                and self.validation.ok
                and all(row.covered for row in self.validation.density)
                and self.compat.ok
                and self.double_writes == 0)

    def render(self) -> str:
        lines = ["glue report:"]
        for c in self.checks:
            lines.append(f"  [{'ok' if c.ok else 'FAIL'}] {c.name}"
                         + (f": {c.detail}" if c.detail else ""))
        lines.append(f"  [{'ok' if self.validation.ok else 'FAIL'}] certificate validation")
        dens_ok = all(row.covered for row in self.validation.density)
        lines.append(f"  [{'ok' if dens_ok else 'FAIL'}] window density")
        lines.append(f"  [{'ok' if self.compat.ok else 'FAIL'}] per-frame compatibility")
        lines.append(f"  [{'ok' if self.double_writes == 0 else 'FAIL'}] write-once audit "
                     f"({self.write_attempts} attempts, {self.double_writes} doubled)")
        admitted = ", ".join(f"{k}={v}" for k, v in self.admitted)
        lines.append(f"  admitted: {admitted}; skips {self.skips}, "
                     f"relocations {self.relocations}, shared anchors {self.shares}, "
                     f"moat writes {self.writes}")
        lines.append(f"  overall: {'ok' if self.ok else 'FAIL'}")
        return "\n".join(lines)


@dataclass(frozen=True)
class GlueResult:
    """Merged configuration, its certificate, and the run's paper trail."""

    merged: Configuration
    certificate: Certificate
    setup: RegionSetup
    events: Tuple[StepEvent, ...]
    report: GlueReport

    def render(self) -> str:
        lines = [f"regions: {self.setup.summary()}"]
        lines.extend(e.render() for e in self.events)
        lines.append(self.report.render())
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# the gluer


class _Gluer:
    def __init__(self, base_cfg: Configuration, base_cert: Certificate,
                 patch_cfg: Configuration, patch_cert: Certificate,
                 p: Profile, setup: RegionSetup, window: Window, budget: int):
        self.p = p
        self.setup = setup
        self.window = window
        self.budget = budget
        self.cfgs = {"base": base_cfg, "patch": patch_cfg}
        self.certs = {"base": base_cert, "patch": patch_cert}
        self.staged = Certificate()
        self.builder = ConfigBuilder(fill=HEADS)
        self.write_sites: Set[Site] = set()
        self.events: List[StepEvent] = []
        self.admitted_source: Dict[int, str] = {}
        self.admitted = {ph: 0 for ph in _PHASES}
        self.skips = 0
        self.relocations = 0
        self.shares = 0
        self.fid = 0
        self.bid = 0
        self.wid = 0

    # -- logging ------------------------------------------------------------

    def log(self, step: str, action: str, level: int, source: str,
            frame_id: int, detail: str = "") -> None:
        self.events.append(StepEvent(step, action, level, source, frame_id, detail))

    def fail(self, msg: str) -> GlueError:
        return GlueError(msg, self.events, self.staged)

    # -- helpers -------------------------------------------------------------

    def _sorted_frames(self, cert: Certificate, level: int) -> List[Frame]:
        return sorted(cert.frames_at(level),
                      key=lambda f: (f.center.x, f.center.y, f.frame_id))

    def _relabel(self, f: Frame) -> Frame:
        fid = self.fid
        self.fid += 1
        boxes = []
        for b in sorted(f.boxes, key=lambda b: b.box_id):
            bid = self.bid
            self.bid += 1
            ws = []
            for w in sorted(b.witnesses, key=lambda w: w.witness_id):
                wid = self.wid
                self.wid += 1
                ws.append(replace(w, witness_id=wid, box_id=bid))
            boxes.append(replace(b, box_id=bid, frame_id=fid, witnesses=tuple(ws)))
        return replace(f, frame_id=fid, boxes=tuple(boxes))

    def _relocate_target(self, path_local: Sequence[R2], fam,
                         center_local: R2) -> Optional[R2]:
        # minimize distance to the frame center over the (closed) gap pieces
        # of the path; ties break on the smaller box-local point
        best: Optional[Tuple[Tuple[Fraction, Fraction, Fraction], R2]] = None
        for la, lb in zip(path_local, path_local[1:]):
            ga, gb = fam.to_global(la), fam.to_global(lb)
            pieces = _segment_gap_pieces(ga, gb, self.setup)
            if not pieces:
                continue
            d = lb - la
            den = dot(d, d)
            for (u, v) in pieces:
                if den == 0:
                    t = u
                else:
                    t = dot(center_local - la, d) / den
                    t = min(max(t, u), v)
                q = pt(la.x + d.x * t, la.y + d.y * t)
                key = (dist2(q, center_local), q.x, q.y)
                if best is None or key < best[0]:
                    best = (key, q)
        return None if best is None else best[1]

    def _process_witness(self, tmp: Certificate, frame: Frame, box: Box,
                         w: Witness, source: str, step: str,
                         pending: Dict[Tuple[Site, int], str],
                         notes: List[StepEvent]):
        """Route one donor witness: keep it, back its face in the moat, or
        relocate it into the gap.  Returns (witness, write ops)."""
        p = self.p
        setup = self.setup
        fam = obstacle_family(tmp, box, p)
        try:
            path_local = fam.system().path(fam.to_local(w.point), p.radius(frame.level))
        except PathError as e:
            raise _SkipFrame(f"witness {w.witness_id}: no safe path ({e})")
        comp = witness_component(p, box, w)
        donor_cfg = self.cfgs[source]

        # fast reject: a path whose bounding box misses the inflated moat
        # bbox cannot meet the gap
        gpts = [fam.to_global(q) for q in path_local]
        bx0, by0, bx1, by1 = setup.bbox_moat
        target_local: Optional[R2] = None
        if not (max(q.x for q in gpts) < bx0 - 1 or min(q.x for q in gpts) > bx1 + 1
                or max(q.y for q in gpts) < by0 - 1 or min(q.y for q in gpts) > by1 + 1):
            target_local = self._relocate_target(path_local, fam,
                                                 fam.to_local(frame.center))

        def claim(anchor: Site, face: str, what: str):
            prev = pending.get((anchor, comp))
            if prev is None:
                prev = self.builder.get(anchor, comp)
            if prev is not None:
                if prev != face:
                    raise _SkipFrame(f"witness {w.witness_id}: {what} anchor "
                                     f"{anchor} already carries the other face")
                self.shares += 1
                return []
            return [(anchor, comp, face)]

        if target_local is None:
            # path clear of the gap: the witness stands, but its face must be
            # readable in the merged configuration
            anchor = w.anchor
            own_region = setup.is_outside(anchor) if source == "base" else setup.is_patch(anchor)
            if own_region:
                return w, []
            if setup.is_moat(anchor):
                face = donor_cfg.get(anchor, comp)
                if face is None:
                    raise _SkipFrame(f"witness {w.witness_id}: donor face missing at {anchor}")
                return w, claim(anchor, face, "moat")
            raise _SkipFrame(f"witness {w.witness_id}: anchored in the opposite "
                             f"region and its path avoids the gap")

        q_global = fam.to_global(target_local)
        anchor = round_site(q_global)
        if not setup.is_moat(anchor):
            raise self.fail(f"internal: relocated anchor {anchor} is not in the moat")
        face = donor_cfg.get(w.anchor, comp)
        if face is None:
            raise _SkipFrame(f"witness {w.witness_id}: donor face missing at {w.anchor}")
        ops = claim(anchor, face, "relocation")
        self.relocations += 1
        notes.append(StepEvent(step, "relocate", frame.level, source, frame.frame_id,
                               f"witness {w.witness_id} -> ({fmt(q_global.x)}, "
                               f"{fmt(q_global.y)}) anchor {anchor}"))
        return replace(w, point=q_global, anchor=anchor, relocated=True), ops

    def _check_separation(self, f: Frame, source: str, step: str) -> None:
        r = self.p.radius(f.level)
        half2 = (r / 2) ** 2
        wide2 = (_F(4, 3) * r) ** 2
        for g in self.staged.frames_at(f.level):
            d2 = dist2(f.center, g.center)
            gsrc = self.admitted_source[g.frame_id]
            if step == "repair":
                if d2 <= half2:
                    raise self.fail(
                        f"repair frame at ({fmt(f.center.x)}, {fmt(f.center.y)}) "
                        f"is not separated from admitted frame {g.frame_id}")
            elif gsrc != source:
                if d2 <= half2:
                    raise self.fail(
                        f"cross-source frames {f.frame_id}/{g.frame_id} at level "
                        f"{f.level} are r/2-close")
                if step == "deep" and d2 <= wide2:
                    raise self.fail(
                        f"deep frames {f.frame_id}/{g.frame_id} from different "
                        f"sources are not 4r/3 apart")

    def _commit(self, f: Frame, donor_id: int, source: str, step: str,
                ops: List[Tuple[Site, int, str]], notes: List[StepEvent]) -> None:
        self.events.extend(notes)
        for (s, c, v) in sorted(ops):
            try:
                self.builder.write(s, c, v)
            except DoubleWriteError as e:
                raise self.fail(f"double assignment: {e}")
            self.write_sites.add(s)
            self.log(step, "write", f.level, source, f.frame_id,
                     f"{v} component {c} at {s}")
        self.staged = self.staged.with_frame(f)
        self.admitted_source[f.frame_id] = source
        rep = validate_certificate(self.staged, self.p)
        if not rep.ok:
            bad = rep.failed()[0]
            raise self.fail(f"validator failed after admitting frame {f.frame_id} "
                            f"({bad.name}: {bad.detail})")
        self.admitted[step] += 1
        self.log(step, "admit", f.level, source, f.frame_id,
                 f"donor {source}#{donor_id}"
                 + (f", {len(ops)} moat writes" if ops else ""))

    def _admit(self, donor_f: Frame, source: str, step: str) -> bool:
        save = (self.fid, self.bid, self.wid)
        try:
            newf = self._relabel(donor_f)
            tmp = self.staged.with_frame(newf)
            pending: Dict[Tuple[Site, int], str] = {}
            ops: List[Tuple[Site, int, str]] = []
            notes: List[StepEvent] = []
            new_boxes = []
            for b in sorted(newf.boxes, key=lambda b: b.box_id):
                ws = []
                for w in sorted(b.witnesses, key=lambda w: w.witness_id):
                    w2, wops = self._process_witness(tmp, newf, b, w, source,
                                                     step, pending, notes)
                    for (s, c, v) in wops:
                        pending[(s, c)] = v
                    ops.extend(wops)
                    ws.append(w2)
                new_boxes.append(replace(b, witnesses=tuple(ws)))
            finalf = replace(newf, boxes=tuple(new_boxes))
            self._check_separation(finalf, source, step)
            self._commit(finalf, donor_f.frame_id, source, step, ops, notes)
            return True
        except _SkipFrame as sk:
            self.fid, self.bid, self.wid = save
            self.skips += 1
            self.log(step, "skip", donor_f.level, source, donor_f.frame_id, sk.reason)
            return False

    # -- seam rebuild ---------------------------------------------------------

    def _admit_rebuilt(self, center: R2, level: int, source: str, step: str,
                       donor_id: int, comp_cells: List[Tuple[int, int]]) -> None:
        p = self.p
        r = p.radius(level)
        centers = [pt(_F(2 * i + 1, 8), _F(2 * j + 1, 8)) for (i, j) in comp_cells]
        if diameter2(centers) < (r / 10) ** 2:
            raise _SkipFrame("gap component diameter below r/10")
        loop = _boundary_loop(comp_cells)
        fid = self.fid
        self.fid += 1
        count = p.boxes_per_frame(level)
        stub = Frame(frame_id=fid, level=level, center=center, radius=r,
                     orientation=0, boxes=())
        try:
            rr = find_radial_rects(stub, loop, count + 1, p)
        except (FindRadialError, CertificateError) as e:
            raise _SkipFrame(f"slot search failed: {e}")
        u = p.directions[rr.orientation]
        v = perp(u)
        pairs = list(zip(rr.rects, rr.crossings))
        # drop one spare slot: the one whose doubled outline houses an
        # admitted higher-level witness if there is exactly one such slot,
        # otherwise the last
        invalid = []
        for idx, (rect, _) in enumerate(pairs):
            hit = False
            for (g, _b, wit) in self.staged.iter_witnesses():
                if g.level <= level:
                    continue
                rel = wit.point - center
                ql = pt(dot(rel, u), dot(rel, v))
                if (abs(ql.x - rect.center.x) <= rect.w
                        and abs(ql.y - rect.center.y) <= rect.h):
                    hit = True
                    break
            if hit:
                invalid.append(idx)
        if len(invalid) > 1:
            raise _SkipFrame(f"{len(invalid)} candidate slots collide with "
                             f"higher-level witnesses")
        drop = invalid[0] if invalid else len(pairs) - 1
        pairs = [pr for k, pr in enumerate(pairs) if k != drop]

        boxes = []
        for rect, _ in pairs:
            bid = self.bid
            self.bid += 1
            bc = center + u.scale(rect.center.x) + v.scale(rect.center.y)
            boxes.append(Box(box_id=bid, frame_id=fid, level=level, center=bc,
                             orientation=rr.orientation, w=rect.w, h=rect.h,
                             k_sec=p.k_sec))
        frame0 = Frame(frame_id=fid, level=level, center=center, radius=r,
                       orientation=rr.orientation, boxes=tuple(boxes))
        tmp = self.staged.with_frame(frame0)

        wlist: List[Witness] = []
        used: Set[Site] = set()
        notes: List[StepEvent] = []
        for box, (rect, crossing) in zip(boxes, pairs):
            cands: List[R2] = list(crossing)
            for ca, cb in zip(crossing, crossing[1:]):
                for num in (1, 2, 3):
                    cands.append(pt(ca.x + (cb.x - ca.x) * _F(num, 4),
                                    ca.y + (cb.y - ca.y) * _F(num, 4)))
            glob = [center + u.scale(q.x) + v.scale(q.y) for q in cands]
            glob.sort(key=lambda q: (dist2(q, center), q.x, q.y))
            chosen = None
            for q in glob:
                if not self.setup.gap_contains(q):
                    continue
                anchor = round_site(q)
                if anchor in used or anchor in self.write_sites:
                    continue
                if not witness_is_safe(tmp, box, p, q):
                    continue
                chosen = (q, anchor, sigma_of_point(p, frame0, box, q))
                break
            if chosen is None:
                raise _SkipFrame(f"no admissible gap witness on the seam "
                                 f"crossing of slot {box.box_id}")
            q, anchor, sig = chosen
            wid = self.wid
            self.wid += 1
            wlist.append(Witness(witness_id=wid, box_id=box.box_id, point=q,
                                 anchor=anchor, sigma=sig))
            used.add(anchor)
            notes.append(StepEvent(step, "place", level, source, fid,
                                   f"witness {wid} at ({fmt(q.x)}, {fmt(q.y)}) "
                                   f"anchor {anchor}"))

        # faces: group by coin-and-bucket index and pick an unorientable split
        groups: Dict[int, List[Tuple[Witness, Box]]] = {}
        for wit, box in zip(wlist, boxes):
            a = wit.anchor[0] % level
            bb = wit.anchor[1] % level
            idx = (((a * level + bb) * p.k_dir + box.orientation) * p.k_sec
                   + (wit.sigma - 1))
            groups.setdefault(idx, []).append((wit, box))
        order = sorted(groups)
        masses = [len(groups[i]) for i in order]
        split = search_unorientable_split(order, masses,
                                          level * level * p.k_dir * p.k_sec,
                                          budget=self.budget)
        if split is None:
            raise _SkipFrame("no unorientable face split for the fresh witnesses")
        ops: List[Tuple[Site, int, str]] = []
        for idx, heads in zip(order, split):
            members = sorted(groups[idx], key=lambda t: t[0].witness_id)
            for rank, (wit, box) in enumerate(members):
                comp = p.component_index(box.orientation, wit.sigma)
                ops.append((wit.anchor, comp, HEADS if rank < heads else TAILS))

        final_boxes = tuple(replace(box, witnesses=(wit,))
                            for box, wit in zip(boxes, wlist))
        finalf = replace(frame0, boxes=final_boxes)
        self._check_separation(finalf, source, step)
        self._commit(finalf, donor_id, source, step, ops, notes)

    def _rebuild(self, center: R2, level: int, donor_id: int, source: str,
                 step: str) -> bool:
        p = self.p
        r = p.radius(level)
        inner = r / 4 + _F(1, 4)
        outer = r - _F(1, 4)
        inner2, outer2 = inner * inner, outer * outer
        cells = []
        for (i, j) in sorted(self.setup.gap_cells()):
            cx, cy = _F(2 * i + 1, 8), _F(2 * j + 1, 8)
            d2 = (cx - center.x) ** 2 + (cy - center.y) ** 2
            if inner2 <= d2 <= outer2:
                cells.append((i, j))
        if not cells:
            self.skips += 1
            self.log(step, "skip", level, source, donor_id,
                     "no gap carrier inside the slot ring")
            return False
        reasons = []
        for comp_cells in _cell_components(cells):
            save = (self.fid, self.bid, self.wid)
            try:
                self._admit_rebuilt(center, level, source, step, donor_id,
                                    comp_cells)
                return True
            except _SkipFrame as sk:
                self.fid, self.bid, self.wid = save
                reasons.append(sk.reason)
        self.skips += 1
        self.log(step, "skip", level, source, donor_id,
                 "; ".join(reasons) if reasons else "no usable gap component")
        return False

    # -- coverage repair -------------------------------------------------------

    def _repair(self, v: R2, level: int) -> None:
        p = self.p
        r = p.radius(level)
        setup = self.setup
        source = "patch" if round_site(v) in setup.patch else "base"
        reach2 = (p.density_factor * r) ** 2
        cands = [f for f in self._sorted_frames(self.certs[source], level)
                 if dist2(f.center, v) <= reach2]
        if not cands:
            raise self.fail(f"coverage repair at level {level}: no donor frame "
                            f"within reach of probe ({fmt(v.x)}, {fmt(v.y)})")
        u = min(cands, key=lambda f: (dist2(f.center, v), f.center.x,
                                      f.center.y, f.frame_id))
        got = setup.closest_gap_point(u.center)
        if got is None or got[1] > (r / 4) ** 2:
            self.skips += 1
            self.log("repair", "skip", level, source, u.frame_id,
                     "donor frame is farther than r/4 from the gap")
            return
        e = got[0]
        dirv = v - u.center
        if dirv.x == 0 and dirv.y == 0:
            dirv = pt(1, 0)
        den = dot(dirv, dirv)
        tstar = dot(e - u.center, dirv) / den
        if tstar < 0:
            tstar = _F(0)
        lo = _F(3, 4) * r
        hi = lo + r / 100
        lo2, hi2 = lo * lo, hi * hi

        def d2at(t: Fraction) -> Fraction:
            return dist2(e, u.center + dirv.scale(t))

        if d2at(tstar) > hi2:
            self.skips += 1
            self.log("repair", "skip", level, source, u.frame_id,
                     "shift ray never meets the target ring")
            return
        if d2at(tstar) >= lo2:
            t = tstar
        else:
            t_hi = tstar
            while d2at(t_hi) < lo2:
                t_hi = 2 * t_hi + 1
            a, b = tstar, t_hi
            while True:
                m = (a + b) / 2
                d2m = d2at(m)
                if d2m < lo2:
                    a = m
                elif d2m > hi2:
                    b = m
                else:
                    t = m
                    break
        u2 = u.center + dirv.scale(t)
        if dist2(u2, u.center) < (r / 2) ** 2:
            raise self.fail("coverage repair shift is shorter than r/2")
        self.log("repair", "target", level, source, u.frame_id,
                 f"probe ({fmt(v.x)}, {fmt(v.y)}) uncovered; shifting donor "
                 f"to ({fmt(u2.x)}, {fmt(u2.y)})")
        self._rebuild(u2, level, u.frame_id, source, "repair")

    # -- the four sweeps -------------------------------------------------------

    def run(self) -> None:
        p = self.p
        setup = self.setup
        low = range(1, min(setup.threshold, p.levels + 1))

        self.log("deep", "phase", 0, "-", -1,
                 f"copying frames deep inside their regions at levels below "
                 f"{setup.threshold}")
        for n in low:
            depth = _F(2, 3) * p.radius(n)
            for source in ("base", "patch"):
                for f in self._sorted_frames(self.certs[source], n):
                    if setup.deeper_than(f.center, depth, source):
                        self._admit(f, source, "deep")

        self.log("keep", "phase", 0, "-", -1,
                 f"copying all base frames at levels {setup.threshold} and up")
        for n in range(setup.threshold, p.levels + 1):
            for f in self._sorted_frames(self.certs["base"], n):
                self._admit(f, "base", "keep")

        self.log("rebuild", "phase", 0, "-", -1,
                 "rebuilding frames that straddle the moat")
        for n in low:
            r = p.radius(n)
            band_lo = r / 4 - 1
            band_hi = _F(2, 3) * r
            for source in ("base", "patch"):
                for f in self._sorted_frames(self.certs[source], n):
                    if (setup.deeper_than(f.center, band_lo, source)
                            and not setup.deeper_than(f.center, band_hi, source)):
                        self._rebuild(f.center, n, f.frame_id, source, "rebuild")

        self.log("repair", "phase", 0, "-", -1, "patching coverage holes")
        for n in low:
            r = p.radius(n)
            spacing = r / 2
            need = p.density_factor * r - _F(3, 4) * spacing
            need2 = need * need
            for v in self.window.probes(spacing):
                if any(dist2(v, g.center) <= need2
                       for g in self.staged.frames_at(n)):
                    continue
                self._repair(v, n)


# ---------------------------------------------------------------------------


def glue(base_cfg: Configuration, base_cert: Certificate,
         patch_cfg: Configuration, patch_cert: Certificate,
         patch_sites: Iterable[Site], p: Profile, window: Window,
         budget: int = game.DEFAULT_BUDGET,
         threshold_override: Optional[int] = None) -> GlueResult:
    """Merge two certified configurations across a finite patch of sites.

    The result keeps ``base_cfg`` outside the inflated patch zone, takes
    ``patch_cfg`` on the patch itself, and leaves the moat between them
    undetermined except for the faces written under relocated or freshly
    placed witnesses.  Both inputs must be valid and compatible with their
    certificates; the merged configuration comes back with a certificate
    that passed validation after every single admission, plus a report
    re-checking restrictions, density over ``window``, compatibility, and
    the write-once audit.

    Raises GlueError (with the partial event log attached) when a donor
    certificate is unusable, a hard separation rule is violated, or a
    coverage hole has no donor in reach.
    """
    if base_cfg.fill != HEADS or patch_cfg.fill != HEADS:
        raise GlueError("both configurations must fill with the H face")
    for tag, cert in (("base", base_cert), ("patch", patch_cert)):
        rep = validate_certificate(cert, p)
        if not rep.ok:
            bad = rep.failed()[0]
            raise GlueError(f"{tag} certificate invalid ({bad.name}: {bad.detail})")
    for tag, cfg, cert in (("base", base_cfg, base_cert),
                           ("patch", patch_cfg, patch_cert)):
        crep = compatible(cfg, cert, p, budget=budget)
        if not crep.ok:
            raise GlueError(f"{tag} configuration is not compatible with its "
                            f"certificate")

    setup = make_regions(patch_sites, p, window=window,
                         threshold_override=threshold_override)
    g = _Gluer(base_cfg, base_cert, patch_cfg, patch_cert, p, setup, window,
               budget)
    g.run()

    writes = g.builder.to_configuration()
    entries = [e for e in base_cfg.entries if setup.is_outside(e[0])]
    entries.extend(e for e in patch_cfg.entries if setup.is_patch(e[0]))
    entries.extend(writes.entries)
    merged = Configuration(entries=tuple(entries), fill=HEADS)

    checks: List[GlueCheck] = []
    bad = ""
    for (s, c, val) in base_cfg.entries:
        if setup.is_outside(s) and merged.get(s, c) != val:
            bad = f"base entry at {s} component {c} lost"
            break
    if not bad:
        for (s, c, val) in merged.entries:
            if setup.is_outside(s) and base_cfg.get(s, c) != val:
                bad = f"merged entry at {s} component {c} not from the base"
                break
    checks.append(GlueCheck("restriction-base", not bad, bad))
    bad = ""
    for (s, c, val) in patch_cfg.entries:
        if setup.is_patch(s) and merged.get(s, c) != val:
            bad = f"patch entry at {s} component {c} lost"
            break
    if not bad:
        for (s, c, val) in merged.entries:
            if setup.is_patch(s) and patch_cfg.get(s, c) != val:
                bad = f"merged entry at {s} component {c} not from the patch"
                break
    checks.append(GlueCheck("restriction-patch", not bad, bad))
    stray = [s for (s, _c, _v) in writes.entries if not setup.is_moat(s)]
    checks.append(GlueCheck("writes-in-moat", not stray,
                            f"stray writes at {stray[:3]}" if stray else ""))

    validation = validate_certificate(g.staged, p, window=window,
                                      probe_factor=_F(1, 2))
    compat_rep = compatible(merged, g.staged, p, budget=budget)
    report = GlueReport(checks=tuple(checks), validation=validation,
                        compat=compat_rep,
                        admitted=tuple((ph, g.admitted[ph]) for ph in _PHASES),
                        skips=g.skips, relocations=g.relocations,
                        shares=g.shares, writes=len(writes.entries),
                        write_attempts=g.builder.write_attempts,
                        double_writes=g.builder.double_writes)
    return GlueResult(merged=merged, certificate=g.staged, setup=setup,
                      events=tuple(g.events), report=report)
