"""Finite two-dimensional patterns and their aperiodicity structure.

A pattern is a finite partial map from lattice sites to symbol ids.  The
central notions:

* an *n-aperiodic pair*: two sites, congruent coordinatewise mod n, that
  carry different symbols — witnessing that no period n is possible;
* *acceptability* of a square pattern against a parameter ladder
  (n_1 < n_2 < ..., r_1 < r_2 < ...): every r_m x r_m window must contain
  an n_m-aperiodic pair, for every tabulated level m;
* the staged construction producing arbitrarily large acceptable squares
  by tiling lined copies of the previous stage around its center, with a
  minimal sparse edit (g, b) re-establishing acceptability at each stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import words

Site = Tuple[int, int]


# ---------------------------------------------------------------------------
# lined sequence (the boundary word and its aperiodicity windows)

@dataclass(frozen=True)
class LinedSequence:
    """A tabulated prefix of the boundary word plus cached window lengths.

    s(n) is the least L such that every length-L subword of the tabulated
    prefix contains two letters at distance n that differ.  The value is
    recomputed on half the prefix as a stabilisation guard, so a prefix
    that is too short fails loudly instead of lying.
    """

    bits: Tuple[int, ...]
    s_table: Dict[int, int] = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_thue_morse(cls, length: int = 4096) -> "LinedSequence":
        return cls(bits=tuple(words.thue_morse(length)))

    def prefix(self, n: int) -> Tuple[int, ...]:
        if n > len(self.bits):
            raise ValueError(f"need {n} boundary letters but only {len(self.bits)} are tabulated")
        return self.bits[:n]

    def s(self, n: int) -> int:
        if n < 1:
            raise ValueError("distance must be positive")
        if n not in self.s_table:
            needed = 64 * (2 * n + 2)
            if len(self.bits) < needed:
                raise ValueError(
                    f"s({n}) needs a tabulated prefix of at least {needed} letters, have {len(self.bits)}")
            full = words.longest_periodic_factor(self.bits, n)
            half = words.longest_periodic_factor(self.bits[: len(self.bits) // 2], n)
            if full != half:
                raise ValueError(f"s({n}) did not stabilise on the tabulated prefix; tabulate more letters")
            self.s_table[n] = full + 1
        return self.s_table[n]


# ---------------------------------------------------------------------------
# patterns

@dataclass(frozen=True)
class Pattern:
    """Finite partial map Site -> symbol id (< alphabet_size)."""

    cells: Mapping[Site, int]
    alphabet_size: int = 2

    def __post_init__(self):
        for s, v in self.cells.items():
            if not (0 <= v < self.alphabet_size):
                raise ValueError(f"symbol {v} at {s} out of range for alphabet of {self.alphabet_size}")

    def __getitem__(self, site: Site) -> int:
        return self.cells[site]

    def get(self, site: Site, default=None):
        return self.cells.get(site, default)

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def domain(self):
        return self.cells.keys()

    def bbox(self) -> Tuple[int, int, int, int]:
        """(x0, y0, width, height) of the bounding rectangle."""
        if not self.cells:
            raise ValueError("empty pattern has no bounding box")
        xs = [s[0] for s in self.cells]
        ys = [s[1] for s in self.cells]
        x0, y0 = min(xs), min(ys)
        return x0, y0, max(xs) - x0 + 1, max(ys) - y0 + 1

    def is_full_rect(self) -> bool:
        x0, y0, w, h = self.bbox()
        return len(self.cells) == w * h

    def to_array(self) -> np.ndarray:
        """Dense array for a total rectangular pattern; A[j, i] = symbol at
        (x0 + i, y0 + j), rows indexed bottom-up."""
        x0, y0, w, h = self.bbox()
        if len(self.cells) != w * h:
            raise ValueError("pattern is not a total rectangle")
        a = np.empty((h, w), dtype=np.int16)
        for (x, y), v in self.cells.items():
            a[y - y0, x - x0] = v
        return a

    @classmethod
    def from_array(cls, a: np.ndarray, origin: Site = (0, 0), alphabet_size: int = 2) -> "Pattern":
        x0, y0 = origin
        cells = {(x0 + i, y0 + j): int(a[j, i]) for j in range(a.shape[0]) for i in range(a.shape[1])}
        return cls(cells, alphabet_size)

    @classmethod
    def constant_square(cls, side: int, value: int = 0, centered: bool = True,
                        alphabet_size: int = 2) -> "Pattern":
        if centered and side % 2 == 0:
            raise ValueError("centered squares need odd side")
        o = -(side - 1) // 2 if centered else 0
        cells = {(o + i, o + j): value for i in range(side) for j in range(side)}
        return cls(cells, alphabet_size)

    def translate(self, v: Site) -> "Pattern":
        dx, dy = v
        return Pattern({(x + dx, y + dy): s for (x, y), s in self.cells.items()}, self.alphabet_size)

    def paste(self, other: "Pattern") -> "Pattern":
        """Overlay: other's cells override this pattern's where they overlap."""
        cells = dict(self.cells)
        cells.update(other.cells)
        return Pattern(cells, max(self.alphabet_size, other.alphabet_size))

    def restrict_window(self, lower_left: Site, side: int) -> "Pattern":
        x0, y0 = lower_left
        cells = {}
        for j in range(side):
            for i in range(side):
                s = (x0 + i, y0 + j)
                if s in self.cells:
                    cells[s] = self.cells[s]
        return Pattern(cells, self.alphabet_size)


def aperiodic_pair(p: Pattern, n: int) -> Optional[Tuple[Site, Site]]:
    """Lexicographically least pair of sites congruent mod n (both
    coordinates) carrying different symbols, or None."""
    if n < 1:
        raise ValueError("modulus must be positive")
    first: Dict[Site, int] = {}
    mixed: set = set()
    for site, v in p.cells.items():
        res = (site[0] % n, site[1] % n)
        if first.setdefault(res, v) != v:
            mixed.add(res)
    if not mixed:
        return None
    u = min(s for s in p.cells if (s[0] % n, s[1] % n) in mixed)
    su = p.cells[u]
    res_u = (u[0] % n, u[1] % n)
    v = min(s for s in p.cells
            if (s[0] % n, s[1] % n) == res_u and p.cells[s] != su)
    return (u, v)


def has_aperiodic_pair(p: Pattern, n: int) -> bool:
    return aperiodic_pair(p, n) is not None


# ---------------------------------------------------------------------------
# acceptability

@dataclass(frozen=True)
class AcceptabilityParams:
    """The level ladder: strictly increasing moduli n_k and window sides r_k."""

    n_seq: Tuple[int, ...]
    r_seq: Tuple[int, ...]

    def __post_init__(self):
        if len(self.n_seq) != len(self.r_seq):
            raise ValueError("n_seq and r_seq must have equal length")
        for seq, name in ((self.n_seq, "n_seq"), (self.r_seq, "r_seq")):
            if any(a <= 0 for a in seq):
                raise ValueError(f"{name} must be positive")
            if any(a >= b for a, b in zip(seq, seq[1:])):
                raise ValueError(f"{name} must be strictly increasing")

    @property
    def levels(self) -> int:
        return len(self.n_seq)

    @property
    def odd_multiple_flags(self) -> Tuple[bool, ...]:
        """Per level: is r_k an odd multiple of n_k?  (True by construction
        for every level the stage builder emits beyond the first.)"""
        return tuple(r % n == 0 and (r // n) % 2 == 1 for n, r in zip(self.n_seq, self.r_seq))

    def level(self, k: int) -> Tuple[int, int]:
        if not (1 <= k <= self.levels):
            raise ValueError(f"level {k} outside tabulated range 1..{self.levels}")
        return self.n_seq[k - 1], self.r_seq[k - 1]


def _window_sums(m: np.ndarray, win_h: int, win_w: int, out_h: int, out_w: int) -> np.ndarray:
    s = np.zeros((m.shape[0] + 1, m.shape[1] + 1), dtype=np.int64)
    s[1:, 1:] = m.cumsum(0).cumsum(1)
    return (s[win_h:win_h + out_h, win_w:win_w + out_w]
            - s[0:out_h, win_w:win_w + out_w]
            - s[win_h:win_h + out_h, 0:out_w]
            + s[0:out_h, 0:out_w])


def _first_pairless_window(a: np.ndarray, r: int, n: int) -> Optional[Site]:
    """First offset (ox, oy), scanning oy then ox, of an r x r window of
    `a` containing no n-aperiodic pair; None if every window has one.

    A total square window is free of n-aperiodic pairs exactly when it is
    invariant under both axis shifts by n (congruent cells in a full grid
    window are linked by chains of such shifts).
    """
    h, w = a.shape
    if r > h or r > w:
        return None
    out_h, out_w = h - r + 1, w - r + 1
    if n >= r:
        return (0, 0)  # all residue classes are singletons: no pair can exist
    mx = (a[:, :-n] != a[:, n:])
    my = (a[:-n, :] != a[n:, :])
    bx = _window_sums(mx, r, r - n, out_h, out_w)
    by = _window_sums(my, r - n, r, out_h, out_w)
    bad = np.argwhere((bx == 0) & (by == 0))
    if bad.size == 0:
        return None
    oy, ox = bad[0]
    return (int(ox), int(oy))


def is_acceptable(p: Pattern, params: AcceptabilityParams, k: int
                  ) -> Tuple[bool, Optional[Tuple[int, Site]]]:
    """Check every r_m x r_m window (m = 1..k) for an n_m-aperiodic pair.

    Returns (True, None) or (False, (m, offset)) where offset is the
    violating window's lower-left corner relative to the pattern's own
    lower-left corner, scanned bottom-to-top then left-to-right, levels in
    ascending order.
    """
    n_k, r_k = params.level(k)
    a = p.to_array()
    if a.shape != (r_k, r_k):
        raise ValueError(f"pattern is {a.shape[1]}x{a.shape[0]}, expected {r_k}x{r_k} at level {k}")
    for m in range(1, k + 1):
        n_m, r_m = params.level(m)
        off = _first_pairless_window(a, r_m, n_m)
        if off is not None:
            return False, (m, off)
    return True, None


# ---------------------------------------------------------------------------
# lined extension

def z_line_extend(p: Pattern, z: LinedSequence) -> Pattern:
    """Wrap a total N x N pattern in a one-cell border whose four sides,
    each read along the counter-clockwise boundary direction and excluding
    corners, are length-N prefixes of z.  Corner cells take z[0]."""
    x0, y0, w, h = p.bbox()
    if w != h or not p.is_full_rect():
        raise ValueError("lined extension needs a total square pattern")
    n = w
    zs = z.prefix(n)
    cells = dict(p.cells)
    for i in range(n):
        cells[(x0 + i, y0 - 1)] = zs[i]          # bottom side, left to right
        cells[(x0 + n, y0 + i)] = zs[i]          # right side, bottom to top
        cells[(x0 + n - 1 - i, y0 + n)] = zs[i]  # top side, right to left
        cells[(x0 - 1, y0 + n - 1 - i)] = zs[i]  # left side, top to bottom
    c = zs[0] if n else z.prefix(1)[0]
    for corner in ((x0 - 1, y0 - 1), (x0 + n, y0 - 1), (x0 - 1, y0 + n), (x0 + n, y0 + n)):
        cells[corner] = c
    return Pattern(cells, p.alphabet_size)


# ---------------------------------------------------------------------------
# staged construction

class ConstructBudgetError(Exception):
    """Raised when the (g, b) candidate budget runs out; carries partials."""

    def __init__(self, stage_k: int, tested: int, stages: Tuple["Stage", ...],
                 claim_checks: Tuple["ClaimCheck", ...]):
        super().__init__(
            f"candidate budget exhausted after {tested} patterns during the stage-{stage_k} edit search")
        self.stage_k = stage_k
        self.tested = tested
        self.stages = stages
        self.claim_checks = claim_checks


@dataclass(frozen=True)
class Stage:
    k: int
    n: int
    r: int
    x: Pattern            # the acceptable centered r x r square
    y: Pattern            # x with the centered (2g+1)-square replaced by b
    g: int
    b: Pattern            # the replacement block, centered, b[origin] = 1
    candidates_tested: int


@dataclass(frozen=True)
class ClaimCheck:
    """Evidence that tiling by the lined y-block alone kills aperiodicity
    at the next modulus: the pure tiling has no next_n-aperiodic pair."""

    k: int
    next_n: int
    tiled: Pattern
    no_pair: bool
    # populated when the tiling size equals r_{k+1} (then the tiling IS the
    # next square with its central block swapped, and full window checking applies)
    violation: Optional[Tuple[int, Site]] = None


@dataclass(frozen=True)
class Construction:
    stages: Tuple[Stage, ...]
    claim_checks: Tuple[ClaimCheck, ...]
    params: AcceptabilityParams
    candidates_tested: int


def _default_seed(r: int) -> Pattern:
    """Centered all-zero square with a single 1 just right of the origin.

    Any centered square with 0 at the origin plus some 1 works; this one
    keeps the stage-2 edit search down to two candidates.
    """
    p = Pattern.constant_square(r, 0, centered=True)
    cells = dict(p.cells)
    cells[(1, 0)] = 1
    return Pattern(cells, 2)


def _candidate_blocks(g: int) -> Iterator[Pattern]:
    """All (2g+1)-square blocks with center bit 1, in lexicographic order
    of the row-major bit string (top row first, left to right)."""
    side = 2 * g + 1
    order = [(x, y) for y in range(g, -g - 1, -1) for x in range(-g, g + 1)]
    free = [s for s in order if s != (0, 0)]
    for counter in range(1 << len(free)):
        cells = {(0, 0): 1}
        for pos, site in enumerate(free):
            cells[site] = (counter >> (len(free) - 1 - pos)) & 1
        yield Pattern(cells, 2)


def _assemble_tiling(center_block: Pattern, ring_block: Pattern, quotient: int) -> Pattern:
    """Centered quotient x quotient arrangement of lined blocks, with
    center_block at the middle and ring_block everywhere else."""
    if quotient % 2 == 0:
        raise ValueError("tiling quotient must be odd to center a block at the origin")
    _, _, side, _ = center_block.bbox()
    half = (quotient - 1) // 2
    cells: Dict[Site, int] = {}
    for a in range(-half, half + 1):
        for b in range(-half, half + 1):
            src = center_block if (a, b) == (0, 0) else ring_block
            ox, oy = a * side, b * side
            for (sx, sy), v in src.cells.items():
                cells[(sx + ox, sy + oy)] = v
    return Pattern(cells, max(center_block.alphabet_size, ring_block.alphabet_size))


def _next_side(k: int, r_k: int, next_n: int, lower_bound: int, min_quotient: int) -> int:
    """Smallest odd multiple of next_n that meets the floor, admits a
    centered block tiling (odd block count), and has tiling quotient at
    least min_quotient."""
    block = r_k + 2
    q = 1
    while True:
        r = q * next_n
        blocks = r // block
        if (r >= lower_bound and blocks >= min_quotient and r % block == 0 and blocks % 2 == 1):
            return r
        q += 2
        if q * next_n > 1000 * max(lower_bound, block * min_quotient):
            raise ValueError(
                f"no odd multiple of {next_n} admits a centered tiling by {block}-blocks "
                f"(block count parity obstruction at stage {k})")


def construct_example(depth: int, z: Optional[LinedSequence] = None, budget: int = 100_000, *,
                      seed: Optional[Pattern] = None, min_quotient: int = 3,
                      bound_uses_next_s: bool = False) -> Construction:
    """Run the staged construction to the given depth.

    Each stage k emits an acceptable centered r_k-square x, the minimal
    edit (g, b) in (g ascending, b lexicographic) order whose application
    y stays acceptable, and a tiling check: surrounding-block-only tilings
    must have no aperiodic pair at the next modulus.  The budget caps the
    total number of edit candidates evaluated across all stages.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if z is None:
        z = LinedSequence.from_thue_morse()

    n_seq: List[int] = [1]
    r_seq: List[int] = [2 * z.s(1) + 3]
    stages: List[Stage] = []
    claim_checks: List[ClaimCheck] = []
    tested_total = 0

    x = seed if seed is not None else _default_seed(r_seq[0])
    if x.get((0, 0)) != 0 or not any(v == 1 for v in x.cells.values()):
        raise ValueError("seed square must carry 0 at the origin and contain a 1")

    for k in range(1, depth + 1):
        params = AcceptabilityParams(tuple(n_seq), tuple(r_seq))
        n_k, r_k = params.level(k)
        ok, viol = is_acceptable(x, params, k)
        if not ok:
            raise AssertionError(f"stage-{k} square failed acceptability at {viol}")

        # minimal (g, b) edit search
        found = None
        tested_here = 0
        for g in range(0, (r_k - 1) // 2 + 1):
            for b in _candidate_blocks(g):
                if tested_total >= budget:
                    raise ConstructBudgetError(k, tested_total, tuple(stages), tuple(claim_checks))
                tested_total += 1
                tested_here += 1
                y = x.paste(b)
                ok, _ = is_acceptable(y, params, k)
                if ok:
                    found = (g, b, y)
                    break
            if found:
                break
        if found is None:
            raise AssertionError(f"stage-{k} edit search exhausted all block sizes")
        g_k, b_k, y_k = found
        stages.append(Stage(k, n_k, r_k, x, y_k, g_k, b_k, tested_here))

        # next-level parameters and the tiling obstruction check
        next_n = k * (r_k + 2)
        x_hat = z_line_extend(x, z)
        y_hat = z_line_extend(y_k, z)

        if k < depth:
            s_ref = z.s(next_n) if bound_uses_next_s else z.s(n_k)
            r_next = _next_side(k, r_k, next_n, 2 * s_ref + 2, min_quotient)
            n_seq.append(next_n)
            r_seq.append(r_next)
            x_next = _assemble_tiling(x_hat, y_hat, r_next // (r_k + 2))
            tiled = _assemble_tiling(y_hat, y_hat, r_next // (r_k + 2))
            next_params = AcceptabilityParams(tuple(n_seq), tuple(r_seq))
            t_ok, t_viol = is_acceptable(tiled, next_params, k + 1)
            if t_ok or t_viol[0] != k + 1:
                raise AssertionError(
                    f"stage-{k} block tiling should fail exactly at level {k + 1}, got {t_viol}")
            if aperiodic_pair(tiled, next_n) is not None:
                raise AssertionError(f"stage-{k} block tiling unexpectedly has a mod-{next_n} pair")
            claim_checks.append(ClaimCheck(k, next_n, tiled, True, t_viol))
            x = x_next
        else:
            tiled = _assemble_tiling(y_hat, y_hat, min_quotient)
            if aperiodic_pair(tiled, next_n) is not None:
                raise AssertionError(f"stage-{k} block tiling unexpectedly has a mod-{next_n} pair")
            claim_checks.append(ClaimCheck(k, next_n, tiled, True, None))

    params = AcceptabilityParams(tuple(n_seq), tuple(r_seq))
    return Construction(tuple(stages), tuple(claim_checks), params, tested_total)


def capital_R(n: int, params: AcceptabilityParams) -> int:
    """min{ r_k : n divides n_k } over the tabulated levels."""
    if n < 1:
        raise ValueError("n must be positive")
    hits = [r for nk, r in zip(params.n_seq, params.r_seq) if nk % n == 0]
    if not hits:
        raise ValueError(f"no tabulated modulus is divisible by {n}")
    return min(hits)
