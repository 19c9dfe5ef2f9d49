"""Search results are checked against a from-scratch breadth-first oracle
that works on raw (unreduced) states and re-derives move legality from the
rules prose, sharing no code with the implementation."""

from collections import deque

import pytest
from hypothesis import given
from hypothesis import strategies as st

import aperiodic.game as game
from aperiodic.game import (
    BUDGET_EXCEEDED, ORIENTABLE, UNORIENTABLE, Move, apply_move,
    greedy_cascade, initial_ckn, is_oriented, legal_moves, orientable,
    replay, threshold_table,
)


def naive_orientable(start, allow_self_moves=True):
    """Plain BFS over raw states; returns True iff some oriented state is
    reachable.  Independent of the package's search code."""

    def succ(s):
        k = len(s)
        for src in range(k):
            for oi, orient in enumerate(("H", "T")):
                if s[src][oi] < 1:
                    continue
                for dest in range(k):
                    if dest == src and not allow_self_moves:
                        continue
                    b = [list(p) for p in s]
                    b[src][oi] -= 1
                    dh, dt = b[dest]
                    if dh == dt:
                        for ci in (0, 1):
                            c = [row[:] for row in b]
                            c[dest][ci] += 1
                            yield tuple(map(tuple, c))
                    else:
                        b[dest][0 if dh < dt else 1] += 1
                        yield tuple(map(tuple, b))

    seen = {start}
    q = deque([start])
    while q:
        s = q.popleft()
        if all(h == 0 or t == 0 for h, t in s):
            return True
        for n in succ(s):
            if n not in seen:
                seen.add(n)
                q.append(n)
    return False


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("n", range(0, 7))
@pytest.mark.parametrize("self_moves", [True, False])
def test_verdict_matches_naive_bfs(k, n, self_moves):
    start = initial_ckn(k, n)
    res = orientable(start, allow_self_moves=self_moves)
    want = ORIENTABLE if naive_orientable(start, self_moves) else UNORIENTABLE
    assert res.verdict == want


@pytest.mark.parametrize("n", [6, 7, 8, 9])
def test_verdict_matches_naive_bfs_three_buckets(n):
    start = initial_ckn(3, n)
    res = orientable(start)
    want = ORIENTABLE if naive_orientable(start) else UNORIENTABLE
    assert res.verdict == want


@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)),
                min_size=1, max_size=3))
def test_verdict_matches_naive_bfs_random_states(buckets):
    start = tuple(buckets)
    res = orientable(start)
    want = ORIENTABLE if naive_orientable(start) else UNORIENTABLE
    assert res.verdict == want


def test_witness_replays_to_oriented_state():
    for k, n in [(2, 3), (3, 6), (3, 7), (4, 12)]:
        res = orientable(initial_ckn(k, n))
        assert res.verdict == ORIENTABLE
        assert res.moves is not None
        end = replay(initial_ckn(k, n), res.moves)
        assert is_oriented(end)


def test_unorientable_has_no_witness():
    res = orientable(initial_ckn(1, 2))
    assert res.verdict == UNORIENTABLE
    assert res.moves is None


def test_budget_exceeded():
    res = orientable(initial_ckn(4, 14), budget=3)
    assert res.verdict == BUDGET_EXCEEDED


def test_move_legality_errors():
    s = initial_ckn(2, 3)  # ((1, 2), (0, 0))
    with pytest.raises(ValueError):
        apply_move(s, Move(0, "H", 1))  # empty destination is a tie
    with pytest.raises(ValueError):
        apply_move(s, Move(1, "H", 0, None))  # no coin to take
    with pytest.raises(ValueError):
        apply_move(s, Move(0, "T", 0, None), allow_self_moves=False)


def test_post_removal_reading():
    # a lone (1,1) bucket: taking H leaves (0,1), so the coin returns as H
    # (matching the minority at landing time) and nothing ever changes
    s = ((1, 1),)
    moves = list(legal_moves(s))
    assert moves == [Move(0, "H", 0, None), Move(0, "T", 0, None)]
    assert apply_move(s, moves[0]) == s
    assert apply_move(s, moves[1]) == s


def test_legal_moves_tie_enumeration():
    s = ((2, 0), (1, 1))
    got = list(legal_moves(s))
    # self-move from bucket 0 reads (1,0) post-removal: minority is T, no tie
    assert Move(0, "H", 0, None) in got
    # bucket 1 holds (1,1), untouched by the removal: that is a tie, so the
    # enumeration splits the move into both landing choices
    assert Move(0, "H", 1, "H") in got and Move(0, "H", 1, "T") in got
    assert Move(0, "H", 1, None) not in got
    assert apply_move(s, Move(0, "H", 0, None)) == ((1, 1), (1, 1))
    for m in got:
        apply_move(s, m)  # every enumerated move must be applicable


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)),
                min_size=1, max_size=3))
def test_legal_moves_all_apply(buckets):
    s = tuple(buckets)
    for m in legal_moves(s):
        t = apply_move(s, m)
        assert sum(a + b for a, b in t) == sum(a + b for a, b in s)


def test_initial_state_split():
    assert initial_ckn(3, 7) == ((3, 4), (0, 0), (0, 0))
    assert initial_ckn(1, 0) == ((0, 0),)


# -- greedy cascade: sweeping bucket i leaves ceil(n_i / 2) tails behind and
#    pushes floor(n_i / 2) coins onward

def test_cascade_tail_counts_closed_form():
    for k in range(1, 5):
        for n in range(0, 32):
            res = greedy_cascade(k, n)
            counts = [n]
            while len(counts) < k:
                counts.append(counts[-1] // 2)
            want = []
            for i, c in enumerate(counts):
                left = c - c // 2 if i < k - 1 else c
                want.append(left)
            got = [h + t for h, t in res.state]
            assert got == want
            # every bucket it left behind is single-orientation iff success
            assert res.success == is_oriented(res.state)
            assert replay(initial_ckn(k, n), res.moves) == res.state


def test_cascade_success_boundary():
    # with k buckets the cascade orients exactly up to 2^k - 1 coins
    for k in range(1, 6):
        assert greedy_cascade(k, 2 ** k - 1).success
        assert not greedy_cascade(k, 2 ** k).success


def test_threshold_table_contents():
    t = threshold_table(2, 4, budget=100_000)
    cells = {(c.k, c.n, c.self_moves): c.verdict for c in t.cells}
    assert cells[(1, 1, True)] == ORIENTABLE
    assert cells[(1, 2, True)] == UNORIENTABLE
    assert cells[(2, 3, True)] == ORIENTABLE
    assert cells[(2, 4, True)] == UNORIENTABLE
    assert not t.contradictions()
