"""Leveled frame certificates over the integer plane.

A certificate is a family of *frames* (disks, grouped by level) carrying
almost-radial *boxes*; each box holds a *witness* point anchored to a nearby
integer site.  Projecting the witnesses of one frame into a coin-and-bucket
game state ties the combinatorial game to the geometry: a certificate is
*compatible* with a symbol configuration when every frame's induced game
state is unorientable.

All coordinates are exact rationals; every check below is an exact
comparison, never a float tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from . import game
from .geometry import RectSpec, SafeSystem, is_sparse
from .rationals import R2, diameter2, dist2, dot, fmt, pt, seg_point_dist2

Site = Tuple[int, int]
_F = Fraction

__all__ = [
    "Box",
    "BuildError",
    "Certificate",
    "CertificateError",
    "ChooseError",
    "CompatReport",
    "ConfigBuilder",
    "Configuration",
    "DoubleWriteError",
    "ExtractError",
    "FindRadialError",
    "Frame",
    "ObstacleFamily",
    "Profile",
    "ProfileError",
    "RadialRects",
    "ValidationReport",
    "Window",
    "Witness",
    "WitnessSymbolError",
    "aperiodicity_extract",
    "box_axes",
    "build_dense_certificate",
    "cbc",
    "choose_compatible_config",
    "compatible",
    "config_projection_pattern",
    "find_radial_rects",
    "obstacle_family",
    "round_site",
    "search_unorientable_split",
    "section_rect_local",
    "sigma_of_point",
    "validate_certificate",
]


class CertificateError(Exception):
    """Base class for errors raised by this module."""


class ProfileError(CertificateError):
    pass


class BuildError(CertificateError):
    pass


class FindRadialError(CertificateError):
    def __init__(self, msg: str, best_orientation: int, best_count: int):
        super().__init__(msg)
        self.best_orientation = best_orientation
        self.best_count = best_count


class WitnessSymbolError(CertificateError):
    def __init__(self, witness_id: int, anchor: Site, component: int):
        super().__init__(
            f"witness {witness_id}: configuration has no value at site "
            f"{anchor} component {component}"
        )
        self.witness_id = witness_id
        self.anchor = anchor
        self.component = component


class ChooseError(CertificateError):
    pass


class ExtractError(CertificateError):
    pass


class DoubleWriteError(CertificateError):
    pass


# ---------------------------------------------------------------------------
# Profiles


def _unit_direction(v) -> R2:
    u = pt(v[0], v[1])
    if u.x * u.x + u.y * u.y != 1:
        raise ProfileError(f"direction {v!r} is not a unit vector")
    return u


@dataclass(frozen=True)
class Profile:
    """Size ladder shared by certificate builders and validators.

    Level n (1-based) frames have radius ``(10/9) * widths[n-1]`` and carry
    ``box_counts[n-1]`` boxes of size ``widths[n-1] x heights[n-1]``.  The
    required growth between consecutive levels and the flatness of level-1
    boxes are hard constraints; having enough witnesses per frame to admit
    an unorientable game state is only advisory (see :meth:`warnings`).
    """

    name: str
    widths: Tuple[Fraction, ...]
    heights: Tuple[Fraction, ...]
    box_counts: Tuple[int, ...]
    k_dir: int
    k_sec: int
    directions: Tuple[R2, ...]
    density_factor: Fraction = _F(10)
    separation_factor: Fraction = _F(1, 2)

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(_F(w) for w in self.widths))
        object.__setattr__(self, "heights", tuple(_F(h) for h in self.heights))
        object.__setattr__(self, "box_counts", tuple(int(n) for n in self.box_counts))
        object.__setattr__(
            self, "directions", tuple(_unit_direction(u) for u in self.directions)
        )
        object.__setattr__(self, "density_factor", _F(self.density_factor))
        object.__setattr__(self, "separation_factor", _F(self.separation_factor))
        if not (len(self.widths) == len(self.heights) == len(self.box_counts)):
            raise ProfileError("widths/heights/box_counts must have equal length")
        if not self.widths:
            raise ProfileError("profile needs at least one level")
        if any(w <= 0 for w in self.widths) or any(h <= 0 for h in self.heights):
            raise ProfileError("box dimensions must be positive")
        if any(n < 1 for n in self.box_counts):
            raise ProfileError("box counts must be positive")
        if self.k_dir < 1 or self.k_sec < 1:
            raise ProfileError("k_dir and k_sec must be positive")
        if len(self.directions) != self.k_dir:
            raise ProfileError("need exactly k_dir directions")
        if len(set(self.directions)) != len(self.directions):
            raise ProfileError("directions must be distinct")
        if self.heights[0] > self.widths[0] / 1000:
            raise ProfileError("level-1 boxes must satisfy h <= w/1000")
        for n in range(1, len(self.widths)):
            if self.heights[n] <= 10 * (self.widths[n - 1] + self.heights[n - 1]):
                raise ProfileError(f"level {n+1} height grows too slowly")
            if self.widths[n] <= 10 * (self.heights[n] + self.widths[n - 1]):
                raise ProfileError(f"level {n+1} width grows too slowly")

    @property
    def levels(self) -> int:
        return len(self.widths)

    def width(self, n: int) -> Fraction:
        return self.widths[n - 1]

    def height(self, n: int) -> Fraction:
        return self.heights[n - 1]

    def radius(self, n: int) -> Fraction:
        return _F(10, 9) * self.widths[n - 1]

    def boxes_per_frame(self, n: int) -> int:
        return self.box_counts[n - 1]

    def bucket_count(self, n: int) -> int:
        return n * n * self.k_dir * self.k_sec

    def components(self) -> int:
        """Number of symbol components stored per site: one per (theta, sigma)."""
        return self.k_dir * self.k_sec

    def component_index(self, theta: int, sigma: int) -> int:
        if not (0 <= theta < self.k_dir and 1 <= sigma <= self.k_sec):
            raise ProfileError(f"bad component ({theta}, {sigma})")
        return theta * self.k_sec + (sigma - 1)

    def ladder_capacity(self, n: int) -> int:
        """Largest box count the almost-radial ladder can place at level n."""
        r, h = self.radius(n), self.height(n)
        step = 101 * h + r / 1_000_000
        span = r / 50 - h
        if span < 0:
            return 0
        return int(span / step) + 1

    def warnings(self) -> Tuple[str, ...]:
        out: List[str] = []
        for n in range(1, self.levels + 1):
            need = 1 << self.bucket_count(n)
            if self.boxes_per_frame(n) < need:
                out.append(
                    f"level {n}: {self.boxes_per_frame(n)} boxes per frame is below "
                    f"the unorientability threshold 2^{self.bucket_count(n)} = {need}"
                )
            if self.boxes_per_frame(n) > self.ladder_capacity(n):
                out.append(
                    f"level {n}: ladder capacity {self.ladder_capacity(n)} cannot "
                    f"place {self.boxes_per_frame(n)} boxes"
                )
        return tuple(out)

    @property
    def executable(self) -> bool:
        """Heuristic: small enough to actually build certificates for."""
        return all(n <= 64 for n in self.box_counts) and all(
            w <= 10**12 for w in self.widths
        )


# ---------------------------------------------------------------------------
# Windows (integer site rectangles)


class Window(Tuple[int, int, int, int]):
    """Inclusive site rectangle (x0, y0, x1, y1)."""

    def __new__(cls, x0: int, y0: int, x1: int, y1: int):
        if x1 < x0 or y1 < y0:
            raise ValueError("empty window")
        return super().__new__(cls, (int(x0), int(y0), int(x1), int(y1)))

    @property
    def x0(self) -> int:
        return self[0]

    @property
    def y0(self) -> int:
        return self[1]

    @property
    def x1(self) -> int:
        return self[2]

    @property
    def y1(self) -> int:
        return self[3]

    def contains_site(self, s: Site) -> bool:
        return self.x0 <= s[0] <= self.x1 and self.y0 <= s[1] <= self.y1

    def contains_point(self, p: R2) -> bool:
        return self.x0 <= p.x <= self.x1 and self.y0 <= p.y <= self.y1

    def rect_dist2(self, p: R2) -> Fraction:
        dx = max(_F(self.x0) - p.x, p.x - _F(self.x1), _F(0))
        dy = max(_F(self.y0) - p.y, p.y - _F(self.y1), _F(0))
        return dx * dx + dy * dy

    def probes(self, spacing: Fraction) -> Tuple[R2, ...]:
        """Grid of probe points covering the window, edges included."""
        spacing = _F(spacing)
        if spacing <= 0:
            raise ValueError("spacing must be positive")
        xs: List[Fraction] = []
        v = _F(self.x0)
        while v < self.x1:
            xs.append(v)
            v += spacing
        xs.append(_F(self.x1))
        ys: List[Fraction] = []
        v = _F(self.y0)
        while v < self.y1:
            ys.append(v)
            v += spacing
        ys.append(_F(self.y1))
        return tuple(pt(x, y) for x in xs for y in ys)


# ---------------------------------------------------------------------------
# Certificate data model


def round_site(p: R2) -> Site:
    """Nearest integer site, ties rounded up; sup-distance is at most 1/2."""
    return (math.floor(p.x + _F(1, 2)), math.floor(p.y + _F(1, 2)))


@dataclass(frozen=True)
class Witness:
    """A marked point of a box, anchored to its nearest integer site.

    ``sigma`` is the section index the witness was created in; it is part of
    the witness identity and survives relocation (a relocated point usually
    leaves its box, so the index cannot be re-derived from the geometry).
    """

    witness_id: int
    box_id: int
    point: R2
    anchor: Site
    sigma: int
    relocated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "point", pt(self.point.x, self.point.y))
        object.__setattr__(self, "anchor", (int(self.anchor[0]), int(self.anchor[1])))
        if self.sigma < 1:
            raise CertificateError("sigma must be a positive section index")


@dataclass(frozen=True)
class Box:
    box_id: int
    frame_id: int
    level: int
    center: R2
    orientation: int
    w: Fraction
    h: Fraction
    k_sec: int
    witnesses: Tuple[Witness, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "w", _F(self.w))
        object.__setattr__(self, "h", _F(self.h))
        if self.w <= 0 or self.h <= 0 or self.w < self.h:
            raise CertificateError("box needs w >= h > 0")
        if self.k_sec < 1:
            raise CertificateError("k_sec must be positive")


@dataclass(frozen=True)
class Frame:
    frame_id: int
    level: int
    center: R2
    radius: Fraction
    orientation: int
    boxes: Tuple[Box, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "radius", _F(self.radius))
        if self.radius <= 0:
            raise CertificateError("frame radius must be positive")


@dataclass(frozen=True)
class Certificate:
    frames: Tuple[Frame, ...] = ()

    def __post_init__(self):
        ids = [f.frame_id for f in self.frames]
        if len(set(ids)) != len(ids):
            raise CertificateError("duplicate frame ids")
        bids = [b.box_id for f in self.frames for b in f.boxes]
        if len(set(bids)) != len(bids):
            raise CertificateError("duplicate box ids")

    def frames_at(self, level: int) -> Tuple[Frame, ...]:
        return tuple(f for f in self.frames if f.level == level)

    def frame_of_box(self, box_id: int) -> Tuple[Frame, Box]:
        for f in self.frames:
            for b in f.boxes:
                if b.box_id == box_id:
                    return f, b
        raise KeyError(box_id)

    def iter_witnesses(self) -> Iterator[Tuple[Frame, Box, Witness]]:
        for f in self.frames:
            for b in f.boxes:
                for w in b.witnesses:
                    yield f, b, w

    def with_frame(self, f: Frame) -> "Certificate":
        return Certificate(self.frames + (f,))

    def next_ids(self) -> Tuple[int, int, int]:
        """(frame_id, box_id, witness_id) counters past everything present."""
        fid = 1 + max((f.frame_id for f in self.frames), default=-1)
        bid = 1 + max((b.box_id for f in self.frames for b in f.boxes), default=-1)
        wid = 1 + max(
            (w.witness_id for _, _, w in self.iter_witnesses()), default=-1
        )
        return fid, bid, wid


# ---------------------------------------------------------------------------
# Box geometry: local frames, sections, sigma


def perp(u: R2) -> R2:
    return pt(-u.y, u.x)


def box_axes(p: Profile, b: Box) -> Tuple[R2, R2]:
    u = p.directions[b.orientation]
    return u, perp(u)


def box_origin(p: Profile, b: Box) -> R2:
    """Global position of the box-local origin (the (0,0) corner)."""
    u, v = box_axes(p, b)
    return b.center - u.scale(b.w / 2) - v.scale(b.h / 2)


def box_to_local(p: Profile, b: Box, q: R2) -> R2:
    u, v = box_axes(p, b)
    d = q - box_origin(p, b)
    return pt(dot(d, u), dot(d, v))


def box_to_global(p: Profile, b: Box, q: R2) -> R2:
    u, v = box_axes(p, b)
    return box_origin(p, b) + u.scale(q.x) + v.scale(q.y)


def box_ascending(p: Profile, f: Frame, b: Box) -> bool:
    """True when box-local x grows away from the frame center."""
    u, _ = box_axes(p, b)
    return dot(b.center - f.center, u) >= 0


def section_rect_local(p: Profile, f: Frame, b: Box, i: int) -> RectSpec:
    """Section i (1-based, numbered from the frame-center end), box-local."""
    if not (1 <= i <= b.k_sec):
        raise CertificateError(f"section index {i} out of range")
    c = b.w / b.k_sec
    if box_ascending(p, f, b):
        lo = (i - 1) * c
    else:
        lo = b.w - i * c
    return RectSpec(center=pt(lo + c / 2, b.h / 2), w=c, h=b.h, level=b.level)


def sigma_of_point(p: Profile, f: Frame, b: Box, q: R2) -> int:
    """Section index containing q (global); boundaries go to the lower index."""
    lx = box_to_local(p, b, q).x
    if not (0 <= lx <= b.w):
        raise CertificateError("point is outside the box along its long axis")
    if not box_ascending(p, f, b):
        lx = b.w - lx
    ratio = lx / (b.w / b.k_sec)
    if ratio == 0:
        return 1
    if ratio.denominator == 1:
        return min(int(ratio), b.k_sec)
    return min(int(ratio) + 1, b.k_sec)


def witness_component(p: Profile, b: Box, w: Witness) -> int:
    return p.component_index(b.orientation, w.sigma)


# ---------------------------------------------------------------------------
# Configurations (partial, write-once symbol assignments)

HEADS = "H"
TAILS = "T"


@dataclass(frozen=True)
class Configuration:
    """Partial map (site, component) -> H/T with a constant fill value.

    ``entries`` is sorted and duplicate-free; lookups fall back to ``fill``
    via :meth:`value` while :meth:`get` reports only explicit assignments.
    """

    entries: Tuple[Tuple[Site, int, str], ...] = ()
    fill: str = HEADS

    def __post_init__(self):
        norm = tuple(
            ((int(s[0]), int(s[1])), int(c), str(v)) for s, c, v in self.entries
        )
        object.__setattr__(self, "entries", tuple(sorted(norm)))
        if self.fill not in (HEADS, TAILS):
            raise CertificateError("fill must be H or T")
        table: Dict[Tuple[Site, int], str] = {}
        for s, c, v in self.entries:
            if v not in (HEADS, TAILS):
                raise CertificateError(f"bad symbol {v!r}")
            key = (s, c)
            if key in table and table[key] != v:
                raise CertificateError(f"conflicting entries at {key}")
            table[key] = v
        object.__setattr__(self, "_table", table)

    def get(self, site: Site, component: int) -> Optional[str]:
        return self._table.get(((int(site[0]), int(site[1])), component))

    def value(self, site: Site, component: int) -> str:
        v = self.get(site, component)
        return self.fill if v is None else v

    def __len__(self) -> int:
        return len(self._table)


class ConfigBuilder:
    """Write-once accumulator for :class:`Configuration` entries."""

    def __init__(self, fill: str = HEADS):
        self.fill = fill
        self._table: Dict[Tuple[Site, int], str] = {}
        self.write_attempts = 0
        self.double_writes = 0

    def has(self, site: Site, component: int) -> bool:
        return ((int(site[0]), int(site[1])), int(component)) in self._table

    def get(self, site: Site, component: int) -> Optional[str]:
        return self._table.get(((int(site[0]), int(site[1])), int(component)))

    def write(self, site: Site, component: int, value: str) -> None:
        if value not in (HEADS, TAILS):
            raise CertificateError(f"bad symbol {value!r}")
        key = ((int(site[0]), int(site[1])), int(component))
        self.write_attempts += 1
        if key in self._table:
            self.double_writes += 1
            raise DoubleWriteError(
                f"component {key[1]} at site {key[0]} already assigned"
            )
        self._table[key] = value

    def to_configuration(self) -> Configuration:
        entries = tuple(
            (site, comp, val) for (site, comp), val in sorted(self._table.items())
        )
        return Configuration(entries=entries, fill=self.fill)


# ---------------------------------------------------------------------------
# Obstacle families and witness safety


@dataclass(frozen=True)
class ObstacleFamily:
    """Rect obstacles of a box, in box-local coordinates.

    ``families`` lists one tuple of rects per participating level, ascending,
    with the box's own two flanking slabs last.  ``sparse_ok`` records an
    80-sparsity check of each level family (informational).
    """

    box_id: int
    origin: R2
    direction: R2
    families: Tuple[Tuple[RectSpec, ...], ...]
    dims: Tuple[Tuple[Fraction, Fraction], ...]
    sparse_ok: bool

    def to_local(self, q: R2) -> R2:
        u = self.direction
        v = perp(u)
        d = q - self.origin
        return pt(dot(d, u), dot(d, v))

    def to_global(self, q: R2) -> R2:
        u = self.direction
        v = perp(u)
        return self.origin + u.scale(q.x) + v.scale(q.y)

    def system(self) -> SafeSystem:
        return SafeSystem.build(self.families, dims=self.dims)


def _rects_meet(a: RectSpec, b: RectSpec) -> bool:
    """Closed intersection test for axis-aligned rects."""
    return (
        abs(a.center.x - b.center.x) * 2 <= a.w + b.w
        and abs(a.center.y - b.center.y) * 2 <= a.h + b.h
    )


def obstacle_family(c: Certificate, b: Box, p: Profile) -> ObstacleFamily:
    """Obstacles constraining witness placement inside box ``b``.

    Two slabs of height h/100 share the box's long sides; below them come the
    equally-oriented sections of every lower-level box whose 2-dilate meets
    the same-index section of ``b``.
    """
    f, _ = c.frame_of_box(b.box_id)
    u, _v = box_axes(p, b)
    origin = box_origin(p, b)

    def to_local(q: R2) -> R2:
        d = q - origin
        return pt(dot(d, u), dot(d, perp(u)))

    b_sections = [section_rect_local(p, f, b, i) for i in range(1, b.k_sec + 1)]
    per_level: Dict[int, List[RectSpec]] = {}
    for g in c.frames:
        if g.level >= b.level:
            continue
        for r in g.boxes:
            if r.orientation != b.orientation:
                continue
            r_origin = box_origin(p, r)
            for i in range(1, r.k_sec + 1):
                sec = section_rect_local(p, g, r, i)
                center_global = (
                    r_origin + u.scale(sec.center.x) + perp(u).scale(sec.center.y)
                )
                local = RectSpec(
                    center=to_local(center_global), w=sec.w, h=sec.h, level=r.level
                )
                dilated = RectSpec(
                    center=local.center, w=2 * local.w, h=2 * local.h, level=r.level
                )
                j = min(i, b.k_sec)
                if _rects_meet(dilated, b_sections[j - 1]):
                    per_level.setdefault(g.level, []).append(local)

    families: List[Tuple[RectSpec, ...]] = []
    dims: List[Tuple[Fraction, Fraction]] = []
    for lvl in sorted(per_level):
        rects = tuple(
            sorted(per_level[lvl], key=lambda r: (r.center.x, r.center.y))
        )
        families.append(rects)
        dims.append((rects[0].w, rects[0].h))
    slab = b.h / 100
    upper = RectSpec(center=pt(b.w / 2, b.h + slab / 2), w=b.w, h=slab, level=b.level)
    lower = RectSpec(center=pt(b.w / 2, -slab / 2), w=b.w, h=slab, level=b.level)
    families.append((upper, lower))
    dims.append((b.w, slab))
    sparse_ok = all(is_sparse(fam, 80) for fam in families)
    return ObstacleFamily(
        box_id=b.box_id,
        origin=origin,
        direction=u,
        families=tuple(families),
        dims=tuple(dims),
        sparse_ok=sparse_ok,
    )


def witness_is_safe(c: Certificate, b: Box, p: Profile, point: R2) -> bool:
    fam = obstacle_family(c, b, p)
    return fam.system().contains(fam.to_local(point))


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class DensityRow:
    level: int
    frame_count: int
    covered: bool
    spacing: Fraction
    worst_detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: Tuple[CheckResult, ...]
    density: Tuple[DensityRow, ...] = ()

    @property
    def ok(self) -> bool:
        return all(ch.ok for ch in self.checks)

    def failed(self) -> Tuple[CheckResult, ...]:
        return tuple(ch for ch in self.checks if not ch.ok)

    def render(self) -> str:
        lines = []
        for ch in self.checks:
            status = "ok" if ch.ok else "FAIL"
            suffix = f" ({ch.detail})" if ch.detail else ""
            lines.append(f"{ch.name}: {status}{suffix}")
        for row in self.density:
            status = "dense" if row.covered else "NOT DENSE"
            suffix = f" ({row.worst_detail})" if row.worst_detail else ""
            lines.append(
                f"density level {row.level}: {status}, {row.frame_count} frames, "
                f"probe spacing {fmt(row.spacing)}{suffix}"
            )
        return "\n".join(lines)


def _box_corners_global(p: Profile, b: Box) -> Tuple[R2, R2, R2, R2]:
    u, v = box_axes(p, b)
    hw, hh = b.w / 2, b.h / 2
    return (
        b.center + u.scale(hw) + v.scale(hh),
        b.center + u.scale(hw) - v.scale(hh),
        b.center - u.scale(hw) + v.scale(hh),
        b.center - u.scale(hw) - v.scale(hh),
    )


def _box_local_in_frame(p: Profile, f: Frame, b: Box) -> Tuple[Fraction, Fraction]:
    """(xi, eta) of the box center relative to the frame center."""
    u, v = box_axes(p, b)
    d = b.center - f.center
    return dot(d, u), dot(d, v)


def _box_pair_dist2(p: Profile, f: Frame, a: Box, b: Box) -> Fraction:
    """Distance^2 between two equally-oriented boxes of one frame."""
    xa, ya = _box_local_in_frame(p, f, a)
    xb, yb = _box_local_in_frame(p, f, b)
    gx = max(_F(0), abs(xa - xb) - (a.w + b.w) / 2)
    gy = max(_F(0), abs(ya - yb) - (a.h + b.h) / 2)
    return gx * gx + gy * gy


def section_pair_dist2(
    p: Profile, fa: Frame, ba: Box, fb: Frame, bb: Box, i: int
) -> Fraction:
    """Distance^2 between the i-th sections of two equally-oriented boxes."""
    if ba.orientation != bb.orientation:
        raise CertificateError("sections of differently oriented boxes")
    u = p.directions[ba.orientation]
    v = perp(u)
    sa = section_rect_local(p, fa, ba, i)
    sb = section_rect_local(p, fb, bb, i)
    oa, ob = box_origin(p, ba), box_origin(p, bb)
    ca = oa + u.scale(sa.center.x) + v.scale(sa.center.y)
    cb = ob + u.scale(sb.center.x) + v.scale(sb.center.y)
    dxi = dot(cb - ca, u)
    deta = dot(cb - ca, v)
    gx = max(_F(0), abs(dxi) - (sa.w + sb.w) / 2)
    gy = max(_F(0), abs(deta) - (sa.h + sb.h) / 2)
    return gx * gx + gy * gy


def validate_certificate(
    c: Certificate,
    p: Profile,
    window: Optional[Window] = None,
    probe_spacing: Optional[Fraction] = None,
    probe_factor: Fraction = _F(1),
) -> ValidationReport:
    """Check every structural invariant; report the first counterexample each.

    Density over ``window`` is reported separately and never fails the
    report: sparse certificates are legal, merely not dense.  Probes are
    laid out on a grid of side ``probe_spacing`` when given, otherwise
    ``probe_factor * radius`` per level; a finer factor certifies coverage
    with less slack to spare.
    """
    checks: List[CheckResult] = []

    def check(name: str, failure: Optional[str]) -> None:
        checks.append(
            CheckResult(name, failure is None, failure if failure else "")
        )

    fail: Optional[str] = None
    for f in c.frames:
        if not (1 <= f.level <= p.levels):
            fail = f"frame {f.frame_id} has unknown level {f.level}"
            break
        if f.radius != p.radius(f.level):
            fail = f"frame {f.frame_id} radius {fmt(f.radius)} != profile value"
            break
        if not (0 <= f.orientation < p.k_dir):
            fail = f"frame {f.frame_id} orientation {f.orientation} out of range"
            break
        for b in f.boxes:
            if (b.w, b.h) != (p.width(f.level), p.height(f.level)):
                fail = f"box {b.box_id} dims do not match level {f.level}"
                break
            if b.k_sec != p.k_sec:
                fail = f"box {b.box_id} has {b.k_sec} sections, expected {p.k_sec}"
                break
            if b.level != f.level or b.frame_id != f.frame_id:
                fail = f"box {b.box_id} cross-links are inconsistent"
                break
        if fail:
            break
    check("profile-conformance", fail)

    fail = None
    for lvl in sorted({f.level for f in c.frames}):
        frames = c.frames_at(lvl)
        need2 = (p.separation_factor * p.radius(lvl)) ** 2
        for i in range(len(frames)):
            for j in range(i + 1, len(frames)):
                if dist2(frames[i].center, frames[j].center) < need2:
                    fail = (
                        f"frames {frames[i].frame_id} and {frames[j].frame_id} at "
                        f"level {lvl} are closer than r/2"
                    )
                    break
            if fail:
                break
        if fail:
            break
    check("frame-separation", fail)

    fail = None
    for f in c.frames:
        if len(f.boxes) != p.boxes_per_frame(f.level):
            fail = (
                f"frame {f.frame_id} has {len(f.boxes)} boxes, expected "
                f"{p.boxes_per_frame(f.level)}"
            )
            break
    check("box-count", fail)

    fail = None
    for f in c.frames:
        for b in f.boxes:
            if b.orientation != f.orientation:
                fail = f"box {b.box_id} orientation differs from frame {f.frame_id}"
                break
        if fail:
            break
    check("box-orientation-shared", fail)

    fail = None
    for f in c.frames:
        need2 = (100 * p.height(f.level)) ** 2
        for i in range(len(f.boxes)):
            for j in range(i + 1, len(f.boxes)):
                if _box_pair_dist2(p, f, f.boxes[i], f.boxes[j]) < need2:
                    fail = (
                        f"boxes {f.boxes[i].box_id} and {f.boxes[j].box_id} are "
                        f"closer than 100h"
                    )
                    break
            if fail:
                break
        if fail:
            break
    check("box-separation", fail)

    fail = None
    for f in c.frames:
        r2 = f.radius * f.radius
        for b in f.boxes:
            corners = _box_corners_global(p, b)
            d2s = [dist2(q, f.center) for q in corners]
            if any(d2 > r2 for d2 in d2s):
                fail = f"box {b.box_id} leaves the frame disk"
                break
            if max(d2s) != r2:
                fail = f"box {b.box_id} does not touch the frame boundary"
                break
        if fail:
            break
    check("box-in-disk", fail)

    fail = None
    for f in c.frames:
        allow = f.radius / 100
        for b in f.boxes:
            _, eta = _box_local_in_frame(p, f, b)
            if abs(eta - b.h / 2) > allow or abs(eta + b.h / 2) > allow:
                fail = f"box {b.box_id} long-side lines miss the frame center"
                break
        if fail:
            break
    check("box-rays", fail)

    fail = None
    for f, b, w in c.iter_witnesses():
        if w.relocated:
            continue
        q = box_to_local(p, b, w.point)
        if not (0 <= q.x <= b.w and 0 <= q.y <= b.h):
            fail = f"witness {w.witness_id} lies outside box {b.box_id}"
            break
    check("witness-in-box", fail)

    fail = None
    for f, b, w in c.iter_witnesses():
        if not (1 <= w.sigma <= b.k_sec):
            fail = f"witness {w.witness_id} has section index {w.sigma} out of range"
            break
        if not w.relocated and sigma_of_point(p, f, b, w.point) != w.sigma:
            fail = (
                f"witness {w.witness_id} stored section {w.sigma} does not match "
                f"its position"
            )
            break
    check("witness-sigma", fail)

    fail = None
    for f, b, w in c.iter_witnesses():
        dx = abs(w.point.x - w.anchor[0])
        dy = abs(w.point.y - w.anchor[1])
        if max(dx, dy) > _F(1, 2):
            fail = f"witness {w.witness_id} anchor is farther than 1/2"
            break
    check("witness-anchor", fail)

    fail = None
    for f, b, w in c.iter_witnesses():
        if not witness_is_safe(c, b, p, w.point):
            fail = f"witness {w.witness_id} is not safe in box {b.box_id}"
            break
    check("witness-safety", fail)

    density: List[DensityRow] = []
    if window is not None:
        for lvl in range(1, p.levels + 1):
            r = p.radius(lvl)
            reach = p.density_factor * r
            spacing = _F(probe_spacing) if probe_spacing is not None else probe_factor * r
            frames = c.frames_at(lvl)
            # A probe within reach - (3/4)*spacing of a center certifies every
            # point in its grid cell: cell points sit within (3/4)*spacing of
            # the probe (exact bound above sqrt(2)/2 * spacing).
            need = reach - _F(3, 4) * spacing
            covered, worst = True, ""
            if need <= 0:
                covered = False
                worst = "probe spacing too coarse for the density radius"
            else:
                need2 = need * need
                for q in window.probes(spacing):
                    if not any(dist2(q, f.center) <= need2 for f in frames):
                        covered = False
                        worst = f"probe ({fmt(q.x)}, {fmt(q.y)}) uncovered"
                        break
            density.append(
                DensityRow(
                    level=lvl,
                    frame_count=len(frames),
                    covered=covered,
                    spacing=spacing,
                    worst_detail=worst,
                )
            )

    return ValidationReport(checks=tuple(checks), density=tuple(density))


# ---------------------------------------------------------------------------
# Coin-and-bucket projection


def cbc(x: Configuration, f: Frame, n_mod: int, p: Profile) -> game.State:
    """Project frame ``f``'s witnesses into a coin-and-bucket game state.

    Buckets are indexed ((a*n + b)*k_dir + theta)*k_sec + (sigma-1), where
    (a, b) is the witness anchor reduced mod ``n_mod`` and (theta, sigma)
    the witness component.  One coin per witness; its face is read from
    ``x`` at the anchor and must be explicitly assigned there.
    """
    if n_mod < 1:
        raise CertificateError("n_mod must be positive")
    buckets = n_mod * n_mod * p.k_dir * p.k_sec
    heads = [0] * buckets
    tails = [0] * buckets
    for b in sorted(f.boxes, key=lambda b: b.box_id):
        for w in b.witnesses:
            a = w.anchor[0] % n_mod
            bb = w.anchor[1] % n_mod
            comp = p.component_index(b.orientation, w.sigma)
            sym = x.get(w.anchor, comp)
            if sym is None:
                raise WitnessSymbolError(w.witness_id, w.anchor, comp)
            idx = ((a * n_mod + bb) * p.k_dir + b.orientation) * p.k_sec + (
                w.sigma - 1
            )
            if sym == HEADS:
                heads[idx] += 1
            else:
                tails[idx] += 1
    return tuple((heads[i], tails[i]) for i in range(buckets))


@dataclass(frozen=True)
class CompatRow:
    frame_id: int
    level: int
    verdict: str
    explored: int


@dataclass(frozen=True)
class CompatReport:
    rows: Tuple[CompatRow, ...]

    @property
    def ok(self) -> bool:
        return all(r.verdict == game.UNORIENTABLE for r in self.rows)

    def render(self) -> str:
        lines = [
            f"frame {r.frame_id} (level {r.level}): {r.verdict} "
            f"[{r.explored} states]"
            for r in self.rows
        ]
        lines.append(f"compatible: {'yes' if self.ok else 'NO'}")
        return "\n".join(lines)


def compatible(
    x: Configuration,
    c: Certificate,
    p: Profile,
    budget: int = game.DEFAULT_BUDGET,
) -> CompatReport:
    """A configuration is compatible when every frame's state is unorientable."""
    rows = []
    for f in sorted(c.frames, key=lambda f: f.frame_id):
        state = cbc(x, f, f.level, p)
        res = game.orientable(state, budget=budget)
        rows.append(
            CompatRow(
                frame_id=f.frame_id,
                level=f.level,
                verdict=res.verdict,
                explored=res.states_explored,
            )
        )
    return CompatReport(rows=tuple(rows))


# ---------------------------------------------------------------------------
# Almost-radial ladder placement


def _circle_point(r: Fraction, m: Fraction) -> Tuple[Fraction, Fraction]:
    """Rational point (X, Y) on the radius-r circle with Y close to m.

    Uses the tangent half-angle parametrization with t = m / (2r), so the
    resulting Y = m / (1 + t^2) is within |m| * t^2 of the target.
    """
    t = m / (2 * r)
    den = 1 + t * t
    return r * (1 - t * t) / den, 2 * r * t / den


def _ladder_intervals(
    r: Fraction, h: Fraction, count: int, lo: Fraction, hi: Fraction
) -> List[Tuple[Fraction, Fraction, Fraction]]:
    """Lateral intervals [a, a+h] with circle-touching outer corners.

    Returns triples (a, X, m) per box: the box spans eta in [a, a+h], its
    outer short edge sits at |xi| = X, and the corner at eta = m lies exactly
    on the circle.  Consecutive intervals are separated by more than 100h.
    Raises BuildError when [lo, hi] cannot host ``count`` boxes.
    """
    if count < 1:
        return []
    slack = r / 1_000_000
    step = 101 * h + slack
    if lo + h + (count - 1) * step > hi:
        raise BuildError(
            f"ladder capacity exceeded: cannot place {count} boxes of height "
            f"{fmt(h)} in a lateral band of [{fmt(lo)}, {fmt(hi)}]"
        )
    out: List[Tuple[Fraction, Fraction, Fraction]] = []
    for k in range(count):
        top_target = lo + h + k * step
        if top_target >= h / 2:
            m = top_target
            X, Y = _circle_point(r, m)
            a = Y - h
        else:
            m = top_target - h
            X, Y = _circle_point(r, m)
            a = Y
        out.append((a, X, m))
    prev_top: Optional[Fraction] = None
    for a, X, m in out:
        if a < lo - slack or a + h > hi + slack:
            raise BuildError("ladder interval drifted outside the allowed band")
        if prev_top is not None and a - prev_top < 100 * h:
            raise BuildError("ladder intervals violate the 100h separation")
        prev_top = a + h
    return out


def _place_boxes(
    p: Profile,
    f: Frame,
    level: int,
    box_id_start: int,
) -> Tuple[Box, ...]:
    """Almost-radial boxes for one frame, stacked on the standard ladder."""
    w, h, r = p.width(level), p.height(level), p.radius(level)
    n = p.boxes_per_frame(level)
    band = r / 100
    triples = _ladder_intervals(r, h, n, -band, band)
    u = p.directions[f.orientation]
    v = perp(u)
    boxes: List[Box] = []
    r2 = r * r
    for k, (a, X, m) in enumerate(triples):
        xi_c = X - w / 2
        eta_c = a + h / 2
        center = f.center + u.scale(xi_c) + v.scale(eta_c)
        corners = (
            (X, a),
            (X, a + h),
            (X - w, a),
            (X - w, a + h),
        )
        d2s = [cx * cx + cy * cy for cx, cy in corners]
        if any(d2 > r2 for d2 in d2s):
            raise BuildError(f"ladder box {k} leaves the frame disk")
        if max(d2s) != r2:
            raise BuildError(f"ladder box {k} fails to touch the frame circle")
        if abs(a) > band or abs(a + h) > band:
            raise BuildError(f"ladder box {k} violates the ray condition")
        if X - w < 0:
            raise BuildError(f"ladder box {k} crosses the frame center")
        boxes.append(
            Box(
                box_id=box_id_start + k,
                frame_id=f.frame_id,
                level=level,
                center=center,
                orientation=f.orientation,
                w=w,
                h=h,
                k_sec=p.k_sec,
            )
        )
    return tuple(boxes)


_WITNESS_XS_DENOMS = (2, 4, 8, 16, 32)


def _witness_x_candidates(w: Fraction) -> Iterator[Fraction]:
    seen = set()
    for den in _WITNESS_XS_DENOMS:
        for num in range(1, den, 2):
            q = w * num / den
            if q not in seen:
                seen.add(q)
                yield q


def _place_witness(
    c: Certificate, b: Box, p: Profile, witness_id: int
) -> Witness:
    """Deterministic safe witness inside ``b``: scan a dyadic grid of x
    positions and take the first free vertical gap in the middle band."""
    f, _ = c.frame_of_box(b.box_id)
    fam = obstacle_family(c, b, p)
    system = fam.system()
    for lx in _witness_x_candidates(b.w):
        ly = system.vertical_gap(lx, b.h / 4, 3 * b.h / 4)
        if ly is not None:
            point = fam.to_global(pt(lx, ly))
            anchor = round_site(point)
            return Witness(
                witness_id=witness_id,
                box_id=b.box_id,
                point=point,
                anchor=anchor,
                sigma=sigma_of_point(p, f, b, point),
            )
    raise BuildError(f"no safe witness position found in box {b.box_id}")


# ---------------------------------------------------------------------------
# Dense certificate builder


def build_dense_certificate(p: Profile, window: Window) -> Certificate:
    """Frames on a per-level lattice of spacing 10 r_n, each fully populated.

    Lattice points within (3/4) of the lattice spacing of the window are
    included, which over-covers the window by construction.  Levels are
    built bottom-up so lower-level boxes exist before higher-level witness
    safety is evaluated.
    """
    if not p.executable:
        raise BuildError(
            f"profile {p.name!r} is not desk-scale; refusing to enumerate frames"
        )
    for msg in p.warnings():
        if "ladder capacity" in msg:
            raise BuildError(msg)

    cert = Certificate()
    frame_id = 0
    box_id = 0
    witness_id = 0
    for level in range(1, p.levels + 1):
        spacing = p.density_factor * p.radius(level)
        margin = _F(3, 4) * spacing
        i_lo = math.ceil((window.x0 - margin) / spacing)
        i_hi = math.floor((window.x1 + margin) / spacing)
        j_lo = math.ceil((window.y0 - margin) / spacing)
        j_hi = math.floor((window.y1 + margin) / spacing)
        level_frames: List[Frame] = []
        for i in range(i_lo, i_hi + 1):
            for j in range(j_lo, j_hi + 1):
                center = pt(i * spacing, j * spacing)
                if window.rect_dist2(center) > margin * margin:
                    continue
                f = Frame(
                    frame_id=frame_id,
                    level=level,
                    center=center,
                    radius=p.radius(level),
                    orientation=(i + j) % p.k_dir,
                )
                boxes = _place_boxes(p, f, level, box_id)
                box_id += len(boxes)
                f = replace(f, boxes=boxes)
                level_frames.append(f)
                frame_id += 1
        # Witness placement sees the finished lower levels plus this level's
        # boxes (same-level boxes never obstruct each other).
        staged = cert
        for f in level_frames:
            staged = staged.with_frame(f)
        finished: List[Frame] = []
        for f in level_frames:
            new_boxes = []
            for b in f.boxes:
                wit = _place_witness(staged, b, p, witness_id)
                witness_id += 1
                new_boxes.append(replace(b, witnesses=(wit,)))
            finished.append(replace(f, boxes=tuple(new_boxes)))
        for f in finished:
            cert = cert.with_frame(f)
    return cert


# ---------------------------------------------------------------------------
# Radial rect search along a polyline


@dataclass(frozen=True)
class RadialRects:
    """Result of :func:`find_radial_rects`, in frame-local coordinates.

    ``rects`` are axis-aligned in the rotated frame basis of
    ``directions[orientation]``; ``crossings`` holds, per rect, one polyline
    component of E crossing it from long side to long side.
    """

    orientation: int
    rects: Tuple[RectSpec, ...]
    crossings: Tuple[Tuple[R2, ...], ...]


def _polyline_in_annulus(f: Frame, pts: Sequence[R2]) -> Optional[str]:
    r2 = f.radius * f.radius
    inner2 = (f.radius / 5) ** 2
    for q in pts:
        if dist2(q, f.center) > r2:
            return "polyline leaves the frame disk"
    for a, b in zip(pts, pts[1:]):
        if seg_point_dist2(a, b, f.center) < inner2:
            return "polyline enters the inner fifth of the frame"
    return None


def _clip_segments_to_rect(
    pts: Sequence[R2], lo_x: Fraction, hi_x: Fraction, lo_y: Fraction, hi_y: Fraction
) -> List[List[R2]]:
    """Connected components of a polyline clipped to a closed rect."""

    def clip_seg(a: R2, b: R2) -> Optional[Tuple[Fraction, Fraction]]:
        t0, t1 = _F(0), _F(1)
        dx, dy = b.x - a.x, b.y - a.y
        for dp, q_lo, q_hi in ((dx, lo_x - a.x, hi_x - a.x), (dy, lo_y - a.y, hi_y - a.y)):
            if dp == 0:
                if q_lo > 0 or q_hi < 0:
                    return None
                continue
            ta, tb = q_lo / dp, q_hi / dp
            if ta > tb:
                ta, tb = tb, ta
            t0, t1 = max(t0, ta), min(t1, tb)
            if t0 > t1:
                return None
        return t0, t1

    comps: List[List[R2]] = []
    cur: List[R2] = []
    for a, b in zip(pts, pts[1:]):
        res = clip_seg(a, b)
        if res is None:
            if cur:
                comps.append(cur)
                cur = []
            continue
        t0, t1 = res
        dxy = b - a
        p0 = a + dxy.scale(t0)
        p1 = a + dxy.scale(t1)
        if cur and cur[-1] == p0:
            if p1 != p0:
                cur.append(p1)
        else:
            if cur:
                comps.append(cur)
            cur = [p0] if p0 == p1 else [p0, p1]
        if t1 < 1:
            comps.append(cur)
            cur = []
    if cur:
        comps.append(cur)
    return [c for c in comps if len(c) >= 1]


def _component_crossing(
    comps: List[List[R2]], lo_y: Fraction, hi_y: Fraction
) -> Optional[Tuple[R2, ...]]:
    for comp in comps:
        ys = [q.y for q in comp]
        if min(ys) == lo_y and max(ys) == hi_y:
            return tuple(comp)
    return None


def find_radial_rects(
    f: Frame,
    polyline: Sequence[R2],
    count: int,
    p: Profile,
) -> RadialRects:
    """Almost-radial rects, pairwise far apart, each crossed by the polyline.

    Tries every profile direction and both sides of the frame; within a
    direction, candidate lateral slots are stacked on the standard ladder
    restricted to the polyline's lateral extent.  Success requires an exact
    crossing component from long side to long side in every returned rect.
    """
    pts = [pt(q.x, q.y) for q in polyline]
    if len(pts) < 2:
        raise CertificateError("polyline needs at least two vertices")
    why = _polyline_in_annulus(f, pts)
    if why is not None:
        raise CertificateError(why)
    diam2 = diameter2(pts)
    lvl = f.level
    w, h, r = p.width(lvl), p.height(lvl), p.radius(lvl)
    if diam2 <= (r / 100) ** 2:
        raise CertificateError("polyline diameter is not above r/100")

    best_orientation, best_count = f.orientation, 0
    band = r / 100
    for orientation in range(p.k_dir):
        u = p.directions[orientation]
        v = perp(u)
        local = [pt(dot(q - f.center, u), dot(q - f.center, v)) for q in pts]
        etas = [q.y for q in local]
        eta_lo, eta_hi = min(etas), max(etas)
        margin = h / 100
        lo = max(-band, eta_lo + margin)
        hi = min(band, eta_hi - margin)
        if hi - lo < h:
            continue
        slack = r / 1_000_000
        step = 101 * h + slack
        capacity = int((hi - lo - h) / step) + 1
        rects: List[RectSpec] = []
        crossings: List[Tuple[R2, ...]] = []
        for k in range(capacity):
            if len(rects) == count:
                break
            top_target = lo + h + k * step
            if top_target >= h / 2:
                m = top_target
                X, Y = _circle_point(r, m)
                a = Y - h
            else:
                m = top_target - h
                X, Y = _circle_point(r, m)
                a = Y
            if a < eta_lo + margin or a + h > eta_hi - margin:
                continue
            if abs(a) > band or abs(a + h) > band:
                continue
            placed = False
            for side in (1, -1):
                if side == 1:
                    xi_lo, xi_hi = X - w, X
                else:
                    xi_lo, xi_hi = -X, -X + w
                comps = _clip_segments_to_rect(local, xi_lo, xi_hi, a, a + h)
                crossing = _component_crossing(comps, a, a + h)
                if crossing is None:
                    continue
                rects.append(
                    RectSpec(
                        center=pt((xi_lo + xi_hi) / 2, a + h / 2),
                        w=w,
                        h=h,
                        level=lvl,
                    )
                )
                crossings.append(crossing)
                placed = True
                break
            if not placed:
                continue
        if len(rects) > best_count:
            best_orientation, best_count = orientation, len(rects)
        if len(rects) >= count:
            return RadialRects(
                orientation=orientation,
                rects=tuple(rects[:count]),
                crossings=tuple(crossings[:count]),
            )
    raise FindRadialError(
        f"only {best_count} of {count} radial rects are placeable "
        f"(best direction index {best_orientation})",
        best_orientation,
        best_count,
    )


# ---------------------------------------------------------------------------
# Compatible configurations


def _split_candidates(masses: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    """Head-count tuples per bucket: balanced split first, then lexicographic."""
    balanced = tuple(m // 2 for m in masses)
    yield balanced

    def rec(i: int, acc: List[int]) -> Iterator[Tuple[int, ...]]:
        if i == len(masses):
            yield tuple(acc)
            return
        for hd in range(masses[i] + 1):
            acc.append(hd)
            yield from rec(i + 1, acc)
            acc.pop()

    for cand in rec(0, []):
        if cand != balanced:
            yield cand


def search_unorientable_split(
    order: Sequence[int],
    masses: Sequence[int],
    total_buckets: int,
    budget: int = game.DEFAULT_BUDGET,
    limit: int = 4096,
) -> Optional[Tuple[int, ...]]:
    """Head counts per occupied bucket making the game state unorientable.

    ``order[i]`` is the bucket index carrying ``masses[i]`` coins.  Returns
    None when no split (within the candidate limit) passes the oracle.
    """
    for cand in _split_candidates(masses):
        limit -= 1
        if limit < 0:
            return None
        state = [(0, 0)] * total_buckets
        for idx, m, hd in zip(order, masses, cand):
            state[idx] = (hd, m - hd)
        res = game.orientable(tuple(state), budget=budget)
        if res.verdict == game.UNORIENTABLE:
            return cand
    return None


def choose_compatible_config(
    c: Certificate,
    p: Profile,
    budget: int = game.DEFAULT_BUDGET,
    swap: bool = False,
) -> Configuration:
    """Assign one component per witness anchor so every frame is unorientable.

    Per frame, witnesses are grouped into their game buckets and heads are
    dealt to the lexicographically earliest witnesses; the balanced split is
    tried first and the full split space is searched if it fails the oracle.
    ``swap=True`` exchanges the two faces everywhere (unorientability is
    preserved by symmetry).
    """
    builder = ConfigBuilder(fill=HEADS)
    for f in sorted(c.frames, key=lambda f: f.frame_id):
        n = f.level
        groups: Dict[int, List[Tuple[Witness, int]]] = {}
        for b in sorted(f.boxes, key=lambda b: b.box_id):
            for w in b.witnesses:
                a = w.anchor[0] % n
                bb = w.anchor[1] % n
                comp = p.component_index(b.orientation, w.sigma)
                idx = ((a * n + bb) * p.k_dir + b.orientation) * p.k_sec + (
                    w.sigma - 1
                )
                groups.setdefault(idx, []).append((w, comp))
        order = sorted(groups)
        masses = [len(groups[i]) for i in order]
        total_buckets = n * n * p.k_dir * p.k_sec
        chosen = search_unorientable_split(order, masses, total_buckets, budget)
        if chosen is None:
            raise ChooseError(
                f"frame {f.frame_id}: no head/tail split of its witnesses "
                f"yields an unorientable state"
            )
        for idx, hd in zip(order, chosen):
            members = sorted(groups[idx], key=lambda t: t[0].witness_id)
            for rank, (w, comp) in enumerate(members):
                val = HEADS if rank < hd else TAILS
                if swap:
                    val = TAILS if val == HEADS else HEADS
                try:
                    builder.write(w.anchor, comp, val)
                except DoubleWriteError as e:
                    raise ChooseError(
                        f"witness {w.witness_id} anchor collides with an "
                        f"earlier assignment: {e}"
                    ) from e
    return builder.to_configuration()


# ---------------------------------------------------------------------------
# Aperiodicity extraction


def aperiodicity_extract(
    x: Configuration, c: Certificate, n: int, p: Profile
) -> Tuple[Site, Site]:
    """Two anchors congruent mod n whose shared component differs in ``x``.

    Scans frames in id order for a bucket holding both faces and returns the
    two smallest witness ids' anchors.  The pair certifies that ``x`` is not
    n-periodic in either lattice direction combination.
    """
    if n < 1:
        raise ExtractError("n must be positive")
    for f in sorted(c.frames, key=lambda f: f.frame_id):
        groups: Dict[int, List[Tuple[int, Site, str]]] = {}
        for b in sorted(f.boxes, key=lambda b: b.box_id):
            for w in b.witnesses:
                comp = p.component_index(b.orientation, w.sigma)
                sym = x.get(w.anchor, comp)
                if sym is None:
                    continue
                a = w.anchor[0] % n
                bb = w.anchor[1] % n
                idx = ((a * n + bb) * p.k_dir + b.orientation) * p.k_sec + (
                    w.sigma - 1
                )
                groups.setdefault(idx, []).append((w.witness_id, w.anchor, sym))
        for idx in sorted(groups):
            members = sorted(groups[idx])
            head = next((m for m in members if m[2] == HEADS), None)
            tail = next((m for m in members if m[2] == TAILS), None)
            if head and tail:
                first, second = sorted((head, tail))
                return first[1], second[1]
    raise ExtractError(f"no mixed bucket found for modulus {n}")


def config_projection_pattern(
    x: Configuration, component: int, lo: Site, hi: Site
):
    """Project one component of ``x`` over a site rectangle as a 0/1 pattern.

    Heads map to 0 (matching the fill) and tails to 1; handy for running
    pattern-level aperiodicity checks against extracted site pairs.
    """
    from .patterns import Pattern

    cells = {}
    for sx in range(lo[0], hi[0] + 1):
        for sy in range(lo[1], hi[1] + 1):
            cells[(sx, sy)] = 0 if x.value((sx, sy), component) == HEADS else 1
    return Pattern(cells=cells, alphabet_size=2)
