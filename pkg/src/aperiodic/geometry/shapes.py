"""Leveled convex shapes: axis-aligned rectangles and diamonds.

A *diamond* is the convex hull of the four points ``center ± (w/2, 0)``,
``center ± (0, h/2)`` -- a rhombus with horizontal/vertical diagonals of
lengths ``w`` and ``h``.  Its boundary slopes are ``±h/w``.  Shapes carry
the level of the family they belong to so that multi-scale procedures can
recover per-level dimensions from the shapes themselves.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

from ..rationals import R2, cross, pt

Rat = Union[int, Fraction]


@dataclass(frozen=True)
class DiamondSpec:
    """Rhombus with axis-parallel diagonals ``w`` (horizontal) and ``h``.

    ``h`` may be zero, giving a horizontal segment; ``w`` must be positive.
    """

    center: R2
    w: Fraction
    h: Fraction
    level: int = 1

    def __post_init__(self):
        object.__setattr__(self, "w", Fraction(self.w))
        object.__setattr__(self, "h", Fraction(self.h))
        if self.w <= 0:
            raise ValueError("diamond width must be positive")
        if self.h < 0:
            raise ValueError("diamond height must be nonnegative")

    @property
    def slope(self) -> Fraction:
        return self.h / self.w

    @property
    def north(self) -> R2:
        return pt(self.center.x, self.center.y + self.h / 2)

    @property
    def south(self) -> R2:
        return pt(self.center.x, self.center.y - self.h / 2)

    def vertices(self) -> Tuple[R2, ...]:
        c, hw, hh = self.center, self.w / 2, self.h / 2
        if hh == 0:
            return (pt(c.x - hw, c.y), pt(c.x + hw, c.y))
        # counterclockwise: east, north, west, south
        return (pt(c.x + hw, c.y), pt(c.x, c.y + hh),
                pt(c.x - hw, c.y), pt(c.x, c.y - hh))

    def contains(self, p: R2) -> bool:
        dx = abs(p.x - self.center.x)
        dy = abs(p.y - self.center.y)
        if self.h == 0:
            return dy == 0 and dx <= self.w / 2
        return dx * self.h + dy * self.w <= self.w * self.h / 2

    def bbox(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        c = self.center
        return (c.x - self.w / 2, c.y - self.h / 2,
                c.x + self.w / 2, c.y + self.h / 2)


@dataclass(frozen=True)
class RectSpec:
    """Closed axis-aligned rectangle of width ``w`` and height ``h``."""

    center: R2
    w: Fraction
    h: Fraction
    level: int = 1

    def __post_init__(self):
        object.__setattr__(self, "w", Fraction(self.w))
        object.__setattr__(self, "h", Fraction(self.h))
        if self.w <= 0 or self.h <= 0:
            raise ValueError("rectangle sides must be positive")

    def vertices(self) -> Tuple[R2, ...]:
        c, hw, hh = self.center, self.w / 2, self.h / 2
        return (pt(c.x + hw, c.y - hh), pt(c.x + hw, c.y + hh),
                pt(c.x - hw, c.y + hh), pt(c.x - hw, c.y - hh))

    def contains(self, p: R2) -> bool:
        return (abs(p.x - self.center.x) <= self.w / 2
                and abs(p.y - self.center.y) <= self.h / 2)

    def bbox(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        c = self.center
        return (c.x - self.w / 2, c.y - self.h / 2,
                c.x + self.w / 2, c.y + self.h / 2)


Shape = Union[DiamondSpec, RectSpec]


def scale_about_center(shape: Shape, c: Rat) -> Shape:
    """Dilate a shape by factor ``c`` about its own center."""
    c = Fraction(c)
    if c <= 0:
        raise ValueError("scale factor must be positive")
    return type(shape)(shape.center, shape.w * c, shape.h * c, shape.level)


def diamond_of_rect(rect: RectSpec) -> DiamondSpec:
    """Smallest concentric diamond containing the rectangle.

    The diamond through the rectangle's corners has diagonals ``2w`` and
    ``2h``; it is the tightest diamond with the same center and the
    rectangle's aspect ratio.
    """
    return DiamondSpec(rect.center, 2 * rect.w, 2 * rect.h, rect.level)


def _project(vertices: Sequence[R2], axis: R2) -> Tuple[Fraction, Fraction]:
    vals = [v.x * axis.x + v.y * axis.y for v in vertices]
    return min(vals), max(vals)


def _axes(vertices: Sequence[R2]) -> Iterable[R2]:
    n = len(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        e = b - a
        if e.x == 0 and e.y == 0:
            continue
        yield pt(-e.y, e.x)


def convex_intersect(a: Sequence[R2], b: Sequence[R2]) -> bool:
    """Whether two closed convex polygons (vertex lists) intersect.

    Separating-axis test over both polygons' edge normals, evaluated
    exactly.  Touching boundaries count as intersection.
    """
    for axis in list(_axes(a)) + list(_axes(b)):
        alo, ahi = _project(a, axis)
        blo, bhi = _project(b, axis)
        if ahi < blo or bhi < alo:
            return False
    return True


def is_sparse(family: Sequence[Shape], c: Rat) -> bool:
    """Whether a family is ``c``-sparse: for every pair of distinct members,
    each one misses the ``c``-dilate (about its own center) of the other.
    """
    c = Fraction(c)
    if c < 1:
        raise ValueError("sparsity factor must be >= 1")
    shapes = list(family)
    dilated = [scale_about_center(s, c) for s in shapes]
    verts = [s.vertices() for s in shapes]
    dverts = [s.vertices() for s in dilated]
    for i in range(len(shapes)):
        for j in range(len(shapes)):
            if i == j:
                continue
            if convex_intersect(verts[i], dverts[j]):
                return False
    return True
