"""The coin-and-bucket orientation game.

States are vectors of (heads, tails) counts per bucket; coins of equal
orientation within a bucket are interchangeable.  A move removes a coin of
a chosen orientation from a source bucket and drops it into a destination
bucket, where it lands with the destination's strictly-less-common
orientation — read *after* the removal — or with a freely chosen one on a
tie (an empty destination counts as a 0-0 tie).  Reading the destination
after removal is what keeps a lone (1H,1T) bucket dead: reading before
removal would let it orient itself through a self-move.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

State = Tuple[Tuple[int, int], ...]

ORIENTABLE = "ORIENTABLE"
UNORIENTABLE = "UNORIENTABLE"
BUDGET_EXCEEDED = "BUDGET_EXCEEDED"

DEFAULT_BUDGET = 1_000_000


class Move(NamedTuple):
    source: int
    orientation: str          # 'H' or 'T': the coin taken from the source
    dest: int
    tie_choice: Optional[str] = None  # present exactly when the destination is tied


@dataclass(frozen=True)
class SearchResult:
    verdict: str
    moves: Optional[Tuple[Move, ...]] = None
    states_explored: int = 0


def initial_ckn(k: int, n: int) -> State:
    """k buckets, all empty except the first: floor(n/2) heads, ceil(n/2) tails."""
    if k < 1:
        raise ValueError("need at least one bucket")
    if n < 0:
        raise ValueError("coin count must be non-negative")
    buckets = [(n // 2, n - n // 2)] + [(0, 0)] * (k - 1)
    return tuple(buckets)


def is_oriented(s: State) -> bool:
    return all(h == 0 or t == 0 for h, t in s)


def total_coins(s: State) -> int:
    return sum(h + t for h, t in s)


def apply_move(s: State, m: Move, allow_self_moves: bool = True) -> State:
    k = len(s)
    if not (0 <= m.source < k):
        raise ValueError(f"illegal move: source bucket {m.source} out of range")
    if not (0 <= m.dest < k):
        raise ValueError(f"illegal move: destination bucket {m.dest} out of range")
    if m.orientation not in ("H", "T"):
        raise ValueError(f"illegal move: unknown orientation {m.orientation!r}")
    if m.source == m.dest and not allow_self_moves:
        raise ValueError("illegal move: self-moves are disabled")

    buckets = list(s)
    h, t = buckets[m.source]
    if m.orientation == "H":
        if h < 1:
            raise ValueError(f"illegal move: bucket {m.source} has no heads coin")
        buckets[m.source] = (h - 1, t)
    else:
        if t < 1:
            raise ValueError(f"illegal move: bucket {m.source} has no tails coin")
        buckets[m.source] = (h, t - 1)

    dh, dt = buckets[m.dest]  # post-removal counts: the coins present at landing time
    if dh == dt:
        if m.tie_choice not in ("H", "T"):
            raise ValueError("illegal move: destination is tied, tie_choice required")
        incoming = m.tie_choice
    else:
        if m.tie_choice is not None:
            raise ValueError("illegal move: destination is not tied, tie_choice must be omitted")
        incoming = "H" if dh < dt else "T"
    buckets[m.dest] = (dh + 1, dt) if incoming == "H" else (dh, dt + 1)
    return tuple(buckets)


def legal_moves(s: State, allow_self_moves: bool = True) -> Iterator[Move]:
    """All legal moves in lexicographic order (source, orientation, dest, tie)."""
    k = len(s)
    for src in range(k):
        h, t = s[src]
        for orient, count in (("H", h), ("T", t)):
            if count < 1:
                continue
            for dest in range(k):
                if dest == src and not allow_self_moves:
                    continue
                dh, dt = s[dest]
                if dest == src:
                    dh, dt = (dh - 1, dt) if orient == "H" else (dh, dt - 1)
                if dh == dt:
                    yield Move(src, orient, dest, "H")
                    yield Move(src, orient, dest, "T")
                else:
                    yield Move(src, orient, dest, None)


def replay(start: State, moves: Tuple[Move, ...], allow_self_moves: bool = True) -> State:
    s = start
    for m in moves:
        s = apply_move(s, m, allow_self_moves)
    return s


# ---------------------------------------------------------------------------
# exhaustive search

def _orbit_canon(s: State) -> State:
    # verdicts are invariant under bucket permutation and a global H/T swap
    a = tuple(sorted(s))
    b = tuple(sorted((t, h) for h, t in s))
    return min(a, b)


def _closure_verdict(start: State, budget: int, allow_self_moves: bool) -> Tuple[str, int]:
    """Decide orientability by closing the reachable set, deduplicated by
    the bucket-permutation / coin-flip symmetry (verdict-preserving)."""
    if is_oriented(start):
        return ORIENTABLE, 0
    seen = {_orbit_canon(start)}
    queue: deque = deque([start])
    explored = 0
    while queue:
        if explored >= budget:
            return BUDGET_EXCEEDED, explored
        s = queue.popleft()
        explored += 1
        for m in legal_moves(s, allow_self_moves):
            nxt = apply_move(s, m, allow_self_moves)
            if is_oriented(nxt):
                return ORIENTABLE, explored
            c = _orbit_canon(nxt)
            if c not in seen:
                seen.add(c)
                queue.append(nxt)
    return UNORIENTABLE, explored


def _witness_bfs(start: State, budget: int, allow_self_moves: bool) -> Tuple[Optional[Tuple[Move, ...]], int]:
    """Shortest witness, lexicographically least among shortest: BFS over
    raw states (bucket identity intact) with moves generated in lex order."""
    if is_oriented(start):
        return (), 0
    parent: Dict[State, Optional[Tuple[State, Move]]] = {start: None}
    queue: deque = deque([start])
    explored = 0
    while queue:
        if explored >= budget:
            return None, explored
        s = queue.popleft()
        explored += 1
        for m in legal_moves(s, allow_self_moves):
            nxt = apply_move(s, m, allow_self_moves)
            if nxt in parent:
                continue
            parent[nxt] = (s, m)
            if is_oriented(nxt):
                out: List[Move] = []
                cur = nxt
                while parent[cur] is not None:
                    prev, mv = parent[cur]
                    out.append(mv)
                    cur = prev
                return tuple(reversed(out)), explored
            queue.append(nxt)
    return None, explored


_verdict_cache: Dict[Tuple[State, bool], SearchResult] = {}


def orientable(start: State, budget: int = DEFAULT_BUDGET, allow_self_moves: bool = True) -> SearchResult:
    """Exhaustive orientability oracle.

    UNORIENTABLE is reported only after the full reachable set closes
    within budget.  ORIENTABLE carries a shortest witness (lexicographically
    least among shortest).  Decisive results are cached; the function is
    pure, so the cache is invisible apart from speed.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    key = (start, allow_self_moves)
    hit = _verdict_cache.get(key)
    if hit is not None:
        return hit
    verdict, used = _closure_verdict(start, budget, allow_self_moves)
    if verdict == BUDGET_EXCEEDED:
        return SearchResult(BUDGET_EXCEEDED, None, used)
    if verdict == UNORIENTABLE:
        result = SearchResult(UNORIENTABLE, None, used)
    else:
        moves, more = _witness_bfs(start, budget - used if budget > used else 1, allow_self_moves)
        if moves is None:
            return SearchResult(BUDGET_EXCEEDED, None, used + more)
        assert is_oriented(replay(start, moves, allow_self_moves))
        result = SearchResult(ORIENTABLE, moves, used + more)
    _verdict_cache[key] = result
    return result


# ---------------------------------------------------------------------------
# the cascade strategy

@dataclass(frozen=True)
class CascadeResult:
    state: State
    moves: Tuple[Move, ...]
    success: bool


def greedy_cascade(k: int, n: int) -> CascadeResult:
    """Sweep the heads of each bucket into the next, one by one, choosing
    tails on every tie.  Arrivals alternate T, H, T, ... so bucket i is left
    with ceil(n_i/2) tails, where n_1 = n and n_{i+1} = floor(n_i/2)."""
    s = initial_ckn(k, n)
    moves: List[Move] = []
    count = n
    for i in range(k - 1):
        to_move = count // 2
        for _ in range(to_move):
            dh, dt = s[i + 1]
            m = Move(i, "H", i + 1, "T" if dh == dt else None)
            s = apply_move(s, m)
            moves.append(m)
        count = to_move
    return CascadeResult(s, tuple(moves), is_oriented(s))


# ---------------------------------------------------------------------------
# the verdict table

@dataclass(frozen=True)
class TableCell:
    k: int
    n: int
    self_moves: bool
    verdict: str
    states_explored: int


@dataclass(frozen=True)
class ThresholdTable:
    k_max: int
    n_max: int
    cells: Tuple[TableCell, ...]

    def cell(self, k: int, n: int, self_moves: bool) -> TableCell:
        for c in self.cells:
            if (c.k, c.n, c.self_moves) == (k, n, self_moves):
                return c
        raise KeyError((k, n, self_moves))

    def threshold(self, k: int, self_moves: bool) -> Optional[int]:
        """Largest n in range with an ORIENTABLE verdict."""
        best = None
        for c in self.cells:
            if c.k == k and c.self_moves == self_moves and c.verdict == ORIENTABLE:
                best = c.n if best is None else max(best, c.n)
        return best

    def contradictions(self) -> Tuple[TableCell, ...]:
        """Cells with n >= 2^k reported ORIENTABLE (there should be none)."""
        return tuple(c for c in self.cells if c.n >= 2 ** c.k and c.verdict == ORIENTABLE)


def threshold_table(k_max: int, n_max: int, budget: int = DEFAULT_BUDGET) -> ThresholdTable:
    cells: List[TableCell] = []
    for self_moves in (True, False):
        for k in range(1, k_max + 1):
            for n in range(1, n_max + 1):
                r = orientable(initial_ckn(k, n), budget, self_moves)
                cells.append(TableCell(k, n, self_moves, r.verdict, r.states_explored))
    return ThresholdTable(k_max, n_max, tuple(cells))


def render_threshold_table(t: ThresholdTable) -> str:
    """Deterministic text rendering with the threshold analysis lines."""
    lines: List[str] = []
    mark = {ORIENTABLE: "O", UNORIENTABLE: "U", BUDGET_EXCEEDED: "?"}
    for self_moves in (True, False):
        lines.append(f"self-moves {'allowed' if self_moves else 'forbidden'}:")
        header = " k\\n |" + "".join(f"{n:>3}" for n in range(1, t.n_max + 1))
        lines.append(header)
        lines.append("-" * len(header))
        for k in range(1, t.k_max + 1):
            row = f"{k:>4} |"
            for n in range(1, t.n_max + 1):
                row += f"{mark[t.cell(k, n, self_moves).verdict]:>3}"
            lines.append(row)
        for k in range(1, t.k_max + 1):
            th = t.threshold(k, self_moves)
            lo, hi = 2 ** k - 1, 2 ** (k + 1) - 1
            if th is None:
                rel = "no orientable n in range"
            elif th == lo:
                rel = f"matches the conservative bound 2^k-1 = {lo}; the claimed 2^(k+1)-1 = {hi} is not met"
            elif th == hi:
                rel = f"matches the claimed 2^(k+1)-1 = {hi}"
            else:
                rel = f"matches neither 2^k-1 = {lo} nor 2^(k+1)-1 = {hi}"
            lines.append(f"  threshold k={k}: largest orientable n = {th} ({rel})")
        lines.append("")
    bad = t.contradictions()
    if bad:
        for c in bad:
            lines.append(f"CONTRADICTION: k={c.k} n={c.n} (n >= 2^k) reported ORIENTABLE")
    else:
        lines.append("no verdict contradicts 'n >= 2^k is unorientable'")
    return "\n".join(lines) + "\n"
