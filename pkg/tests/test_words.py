from hypothesis import given
from hypothesis import strategies as st

from aperiodic.words import (
    aperiodicity_window, factor_set, has_aperiodic_pair, is_periodic_word,
    longest_periodic_factor, thue_morse, tm_letter,
)

# first 32 letters, from the standard bit-count definition
TM32 = [bin(i).count("1") % 2 for i in range(32)]


def test_thue_morse_prefix():
    assert thue_morse(32) == TM32
    assert thue_morse(0) == []


def test_tm_letter_matches_prefix():
    assert [tm_letter(i) for i in range(32)] == TM32


def test_tm_substitution_invariance():
    # image under 0 -> 01, 1 -> 10 is the sequence itself
    w = thue_morse(64)
    image = []
    for a in thue_morse(32):
        image += [a, 1 - a]
    assert image == w


def test_is_periodic_word():
    assert is_periodic_word([0, 1, 0, 1, 0], 2)
    assert not is_periodic_word([0, 1, 1, 1], 2)
    assert is_periodic_word([0, 1], 5)  # vacuous


@given(st.integers(1, 40))
def test_tm_not_eventually_periodic(p):
    w = thue_morse(6 * p + 12)
    assert has_aperiodic_pair(w, p)


def test_longest_periodic_factor():
    assert longest_periodic_factor([0, 1, 0, 1, 0, 0], 2) == 5
    assert longest_periodic_factor([0, 1], 7) == 2  # capped by length


@given(st.lists(st.integers(0, 1), min_size=1, max_size=30), st.integers(1, 8))
def test_longest_periodic_factor_bruteforce(w, p):
    def periodic_runs():
        best = 0
        for i in range(len(w)):
            for j in range(i + 1, len(w) + 1):
                if is_periodic_word(w[i:j], p):
                    best = max(best, j - i)
        return best

    assert longest_periodic_factor(w, p) == periodic_runs()


def test_aperiodicity_window_small_distances():
    # overlap-freeness keeps every p-periodic factor at 2p or shorter
    for p in range(1, 12):
        L = aperiodicity_window(p)
        assert L <= 2 * p + 1
        w = thue_morse(4 * L)
        for i in range(len(w) - L + 1):
            assert has_aperiodic_pair(w[i:i + L], p)


def test_factor_set_counts():
    w = thue_morse(256)
    # factor complexity of Thue-Morse at small lengths: 1, 2, 4, 6, 10, 12
    assert [len(factor_set(w, n)) for n in range(6)] == [1, 2, 4, 6, 10, 12]
