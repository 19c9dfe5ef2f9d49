"""Named size profiles.

The desk-scale profiles are small enough to build and validate certificates
for in tests and from the CLI; ``full_scale()`` shows the parameter regime
the construction is actually aimed at (its numbers are exact but far too
large to enumerate frames for, and the builder refuses it).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Tuple

from .certificate import Profile
from .rationals import R2, pt

_F = Fraction

__all__ = ["DIRECTIONS", "full_scale", "get_profile", "make_directions", "profile_names"]


# Small direction tables: exact rational unit vectors, listed by angle.
DIRECTIONS: Dict[int, Tuple[Tuple[Fraction, Fraction], ...]] = {
    1: ((_F(1), _F(0)),),
    2: ((_F(1), _F(0)), (_F(0), _F(1))),
    4: ((_F(1), _F(0)), (_F(0), _F(1)), (_F(-1), _F(0)), (_F(0), _F(-1))),
    8: (
        (_F(1), _F(0)),
        (_F(3, 5), _F(4, 5)),
        (_F(0), _F(1)),
        (_F(-4, 5), _F(3, 5)),
        (_F(-1), _F(0)),
        (_F(-3, 5), _F(-4, 5)),
        (_F(0), _F(-1)),
        (_F(4, 5), _F(-3, 5)),
    ),
}


def make_directions(k: int) -> Tuple[R2, ...]:
    """k distinct rational unit vectors, approximately equally spaced.

    Small k uses the fixed tables above; otherwise each target angle is
    realised exactly on the circle through the tangent half-angle map of a
    rational approximation of tan(angle/2).
    """
    if k in DIRECTIONS:
        return tuple(pt(a, b) for a, b in DIRECTIONS[k])
    out = []
    for j in range(k):
        phi = 2 * math.pi * j / k
        if abs(phi - math.pi) < 1e-12:
            out.append(pt(-1, 0))
            continue
        t = _F(math.tan(phi / 2)).limit_denominator(10**6)
        den = 1 + t * t
        out.append(pt((1 - t * t) / den, 2 * t / den))
    if len(set(out)) != k:
        raise ValueError(f"direction table for k={k} collapsed")
    return tuple(out)


def _unit1() -> Profile:
    return Profile(
        name="unit1",
        widths=(_F(22500),),
        heights=(_F(4),),
        box_counts=(2,),
        k_dir=1,
        k_sec=1,
        directions=make_directions(1),
    )


def _desk1() -> Profile:
    return Profile(
        name="desk1",
        widths=(_F(63000),),
        heights=(_F(4),),
        box_counts=(4,),
        k_dir=2,
        k_sec=1,
        directions=make_directions(2),
    )


def _desk1s2() -> Profile:
    return Profile(
        name="desk1s2",
        widths=(_F(63000),),
        heights=(_F(4),),
        box_counts=(4,),
        k_dir=1,
        k_sec=2,
        directions=make_directions(1),
    )


def _glue1() -> Profile:
    # Deliberately squat boxes: radius 50000/9 with box height 1/2 leaves
    # room for box_count + 1 ladder slots, which the repair search needs
    # when it rebuilds a neighborhood from scratch.
    return Profile(
        name="glue1",
        widths=(_F(5000),),
        heights=(_F(1, 2),),
        box_counts=(2,),
        k_dir=1,
        k_sec=1,
        directions=make_directions(1),
    )


def _desk2() -> Profile:
    return Profile(
        name="desk2",
        widths=(_F(22500), _F(18_000_000_000)),
        heights=(_F(4), _F(250_000)),
        box_counts=(2, 16),
        k_dir=1,
        k_sec=1,
        directions=make_directions(1),
    )


def full_scale(levels: int = 3, k: int = 1000) -> Profile:
    """The intended asymptotic regime: k^2 components, doubly exponential
    witness counts, widths sized to the ladder capacity.  Not executable."""
    widths, heights, counts = [], [], []
    h = _F(10**4)
    prev_w = _F(0)
    for n in range(1, levels + 1):
        if n > 1:
            h = 100 * (prev_w + h)
        buckets = n * n * k * k
        count = 1 << buckets
        w = 5050 * h * (101 * count - 100)  # comfortably above ladder demand
        w = max(w, 11 * (10 * (h + prev_w)))
        widths.append(w)
        heights.append(h)
        counts.append(count)
        prev_w = w
    return Profile(
        name=f"full-scale-{levels}x{k}",
        widths=tuple(widths),
        heights=tuple(heights),
        box_counts=tuple(counts),
        k_dir=k,
        k_sec=k,
        directions=make_directions(k),
    )


_REGISTRY = {
    "unit1": _unit1,
    "desk1": _desk1,
    "desk1s2": _desk1s2,
    "glue1": _glue1,
    "desk2": _desk2,
}


def profile_names() -> Tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def get_profile(name: str) -> Profile:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(
            f"unknown profile {name!r}; available: {', '.join(profile_names())}"
        ) from None
    return factory()
