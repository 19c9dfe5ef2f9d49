"""Exact rational plane arithmetic.

Every geometric predicate in this package is decided over the rationals:
distances are only ever *compared*, so we work with squared distances and
never take a square root inside a decision path.  Square roots appear only
in display code, where a certified rational lower/upper bound is enough.
"""

from __future__ import annotations

import math
import re
from decimal import Decimal, getcontext
from fractions import Fraction
from typing import NamedTuple, Union

Rat = Union[int, Fraction]


class R2(NamedTuple):
    """A point (or vector) of the rational plane."""

    x: Fraction
    y: Fraction

    def __add__(self, other: "R2") -> "R2":  # type: ignore[override]
        return R2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "R2") -> "R2":
        return R2(self.x - other.x, self.y - other.y)

    def scale(self, c: Rat) -> "R2":
        return R2(self.x * c, self.y * c)

    def __str__(self) -> str:
        return f"({fmt(self.x)}, {fmt(self.y)})"


def pt(x: Rat, y: Rat) -> R2:
    return R2(Fraction(x), Fraction(y))


def dot(a: R2, b: R2) -> Fraction:
    return a.x * b.x + a.y * b.y


def cross(a: R2, b: R2) -> Fraction:
    return a.x * b.y - a.y * b.x


def dist2(a: R2, b: R2) -> Fraction:
    dx, dy = a.x - b.x, a.y - b.y
    return dx * dx + dy * dy


def seg_point_dist2(a: R2, b: R2, p: R2) -> Fraction:
    """Squared distance from point p to the closed segment [a, b]."""
    ab = b - a
    den = dot(ab, ab)
    if den == 0:
        return dist2(a, p)
    t = dot(p - a, ab) / den
    if t < 0:
        t = Fraction(0)
    elif t > 1:
        t = Fraction(1)
    return dist2(a + ab.scale(t), p)


def _orient(a: R2, b: R2, c: R2) -> int:
    v = cross(b - a, c - a)
    return (v > 0) - (v < 0)


def _on_segment(a: R2, b: R2, p: R2) -> bool:
    # assumes a, b, p collinear
    return (min(a.x, b.x) <= p.x <= max(a.x, b.x)
            and min(a.y, b.y) <= p.y <= max(a.y, b.y))


def segments_intersect(a: R2, b: R2, c: R2, d: R2) -> bool:
    """Closed-segment intersection test (touching counts)."""
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and _on_segment(a, b, c):
        return True
    if o2 == 0 and _on_segment(a, b, d):
        return True
    if o3 == 0 and _on_segment(c, d, a):
        return True
    if o4 == 0 and _on_segment(c, d, b):
        return True
    return False


def seg_seg_dist2(a: R2, b: R2, c: R2, d: R2) -> Fraction:
    """Squared distance between two closed segments."""
    if segments_intersect(a, b, c, d):
        return Fraction(0)
    return min(
        seg_point_dist2(a, b, c),
        seg_point_dist2(a, b, d),
        seg_point_dist2(c, d, a),
        seg_point_dist2(c, d, b),
    )


def convex_hull(points) -> list:
    """Convex hull vertices, CCW, collinear interior points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def march(seq):
        out: list = []
        for p in seq:
            while len(out) >= 2 and cross(out[-1] - out[-2], p - out[-2]) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = march(pts)
    upper = march(reversed(pts))
    return lower[:-1] + upper[:-1]


def diameter2(points) -> Fraction:
    """Largest squared distance between any two of the given points."""
    hull = convex_hull(points)
    if len(hull) < 2:
        return Fraction(0)
    return max(
        dist2(hull[i], hull[j])
        for i in range(len(hull))
        for j in range(i + 1, len(hull))
    )


# ---------------------------------------------------------------------------
# certified rational square roots (display / bound work only)

def sqrt_lower(q: Rat, digits: int = 0) -> Fraction:
    """A rational lower bound for sqrt(q), tight to `digits` decimal places."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative radicand")
    scale = 10 ** digits
    # sqrt(a/b) = sqrt(a*b)/b; floor via integer isqrt after scaling
    n = q.numerator * q.denominator * scale * scale
    return Fraction(math.isqrt(n), q.denominator * scale)


def sqrt_upper(q: Rat, digits: int = 0) -> Fraction:
    """A rational upper bound for sqrt(q), tight to `digits` decimal places."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative radicand")
    scale = 10 ** digits
    n = q.numerator * q.denominator * scale * scale
    r = math.isqrt(n)
    if r * r < n:
        r += 1
    return Fraction(r, q.denominator * scale)


# ---------------------------------------------------------------------------
# parsing / formatting

_FRACTION_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_fraction(s: str) -> Fraction:
    """Parse 'p/q', a plain integer, or a decimal literal into a Fraction."""
    m = _FRACTION_RE.match(s)
    if m:
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) else 1
        return Fraction(num, den)
    return Fraction(s.strip())  # handles decimal strings like "0.25"


def fmt(q: Rat) -> str:
    """Render a rational as 'p/q', or as a bare integer when q == 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def decimal_str(q: Rat, sig: int = 12) -> str:
    """Approximate decimal rendering with `sig` significant digits."""
    q = Fraction(q)
    getcontext().prec = sig
    d = Decimal(q.numerator) / Decimal(q.denominator)
    return format(d.normalize(), "f") if -1e12 < float(d) < 1e12 else str(d)
