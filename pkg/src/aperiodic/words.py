"""Binary sequences and their aperiodicity windows.

The base sequence is the Thue-Morse word z: z[i] = parity of the bit count
of i.  Being overlap-free, z contains no p-periodic factor of length 2p+1,
which gives a hard upper bound used to size all scans below.
"""

from __future__ import annotations

from functools import lru_cache
from typing import List, Sequence


def thue_morse(n: int) -> List[int]:
    """First n letters of the Thue-Morse word (0-indexed, z[0] = 0)."""
    return [bin(i).count("1") & 1 for i in range(n)]


@lru_cache(maxsize=None)
def _tm_prefix(n: int) -> tuple:
    return tuple(thue_morse(n))


def tm_letter(i: int) -> int:
    """Single Thue-Morse letter without materialising a prefix."""
    if i < 0:
        raise ValueError("index must be non-negative")
    return bin(i).count("1") & 1


def is_periodic_word(w: Sequence[int], p: int) -> bool:
    """True when w[i] == w[i+p] for every valid i (vacuously for len(w) <= p)."""
    return all(w[i] == w[i + p] for i in range(len(w) - p))


def has_aperiodic_pair(w: Sequence[int], p: int) -> bool:
    """True when some pair of letters at distance exactly p differs."""
    return not is_periodic_word(w, p)


def longest_periodic_factor(w: Sequence[int], p: int) -> int:
    """Length of the longest p-periodic factor of w.

    Factors of length <= p are vacuously p-periodic, so the result is
    always at least min(len(w), p).
    """
    best = min(len(w), p)
    run = 0
    for i in range(len(w) - p):
        if w[i] == w[i + p]:
            run += 1
            if run + p > best:
                best = run + p
        else:
            run = 0
    return best


def aperiodicity_window(p: int, prefix_factor: int = 64) -> int:
    """Least L such that every length-L factor of Thue-Morse has two
    letters at distance p that differ.

    The scan prefix is sized well past the sequence's linear recurrence
    bound, and the answer is recomputed on a doubled prefix as a guard.
    """
    if p < 1:
        raise ValueError("distance must be positive")
    prefix_len = prefix_factor * (2 * p + 2)
    w = _tm_prefix(prefix_len)
    best = longest_periodic_factor(w, p)
    # overlap-freeness caps p-periodic factors strictly below 2p + 1
    if best > 2 * p:
        raise AssertionError(f"periodic factor of length {best} exceeds overlap-free bound for p={p}")
    w2 = _tm_prefix(2 * prefix_len)
    if longest_periodic_factor(w2, p) != best:
        raise AssertionError(f"aperiodicity window for p={p} did not stabilise; enlarge prefix_factor")
    return best + 1


def factor_set(w: Sequence[int], length: int) -> set:
    """All factors of w of the given length, as tuples."""
    return {tuple(w[i:i + length]) for i in range(len(w) - length + 1)}
