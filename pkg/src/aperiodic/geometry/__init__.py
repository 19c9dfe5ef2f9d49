"""Exact rational plane geometry: diamonds, jigsaw regions, hulls of
leveled diamond families, and safe sets / safe paths over rectangle
obstacle families.

Everything is decided over the rationals; distances are compared through
their squares and no floating point enters any predicate.
"""

from .shapes import (DiamondSpec, RectSpec, diamond_of_rect, is_sparse,
                     scale_about_center, convex_intersect)
from .jigsaw import Jigsaw, DoubleJigsaw, tri_jigsaw, jigsaw_max, adjoin
from .hull import Hull, MergeEvent, build_hull, check_hypotheses, HypothesisReport, merge_diff_bbox
from .safe import SafeSystem, safe_contains, safe_path, PathError

__all__ = [
    "DiamondSpec", "RectSpec", "diamond_of_rect", "is_sparse",
    "scale_about_center", "convex_intersect",
    "Jigsaw", "DoubleJigsaw", "tri_jigsaw", "jigsaw_max", "adjoin",
    "Hull", "MergeEvent", "build_hull", "check_hypotheses", "HypothesisReport",
    "merge_diff_bbox",
    "SafeSystem", "safe_contains", "safe_path", "PathError",
]
