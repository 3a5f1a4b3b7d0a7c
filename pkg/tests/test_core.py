from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsummary.core import (
    MAX_WEIGHT,
    Algorithm,
    SummaryState,
    delete_entry,
    insert,
    new_summary,
    reconstruct_rank_bounds,
    resolve_ell,
)


def entry(state, value):
    return next(e for e in state.entries if e.value == value)


def gdG(state, value):
    e = entry(state, value)
    return e.g, e.delta, e.G


def bounds(state):
    return {v: tuple(b) for v, b, _ in reconstruct_rank_bounds(state)[:-1]}


# Weighted worked example.  The displayed g of element 10 is 3 here: that is
# the only value consistent with its r-min of 3 and G of 6, and with the g of
# 9 that 21 reaches after deleting 10.
WEIGHTED_ROWS = [(10, 3, 2, 4), (21, 3, 3, 2), (30, 7, 0, 3)]
# Unweighted worked example; a leading element at rank 1 makes r-min(10) = 3.
UNWEIGHTED_ROWS = [(5, 1, 0, 1), (10, 2, 2, 1), (21, 3, 3, 1), (30, 7, 0, 1)]


def test_unweighted_replay_insert_and_delete():
    s = SummaryState.from_entries(1, "gk", UNWEIGHTED_ROWS)
    assert bounds(s) == {5: (1, 1), 10: (3, 5), 21: (6, 9), 30: (13, 13)}
    e = insert(s, 25)
    assert (e.g, e.delta) == (1, 6)
    assert bounds(s)[25] == (7, 13)
    assert bounds(s)[30] == (14, 14)
    delete_entry(s, entry(s, 10))
    assert gdG(s, 21)[:2] == (5, 3)
    assert bounds(s)[21] == (6, 9)


def test_weighted_replay_insert_and_delete():
    s = SummaryState.from_entries(1, "wgk", WEIGHTED_ROWS)
    assert bounds(s) == {10: (3, 5), 21: (9, 12), 30: (17, 17)}
    assert [gdG(s, v)[2] for v in (10, 21, 30)] == [6, 4, 9]
    e = insert(s, 25, 2)
    assert (e.g, e.delta, e.G) == (1, 6, 2)
    assert bounds(s)[25] == (11, 17)
    assert bounds(s)[30] == (19, 19)
    assert gdG(s, 30) == (7, 0, 9)
    delete_entry(s, entry(s, 10))
    assert gdG(s, 21) == (9, 3, 10)
    assert bounds(s)[21] == (9, 12)


@pytest.mark.parametrize("eps,ell", [(0.5, 2), (0.01, 100), (0.003, 333), (Fraction(1, 7), 7), ("0.25", 4)])
def test_resolve_ell(eps, ell):
    assert resolve_ell(eps) == ell
    s = new_summary(eps)
    assert s.ell == ell and s.effective_epsilon == Fraction(1, ell)
    assert s.size == 0 and s.sentinel.g == 1 and s.sentinel.delta == 0


@pytest.mark.parametrize("eps", [0, 1, 1.5, -0.1])
def test_rejects_bad_epsilon(eps):
    with pytest.raises(ValueError):
        new_summary(eps)


def test_first_insert_gets_zero_delta():
    s = new_summary(0.1)
    e = insert(s, 42, 3)
    assert (e.g, e.delta, e.t0) == (1, 0, 0)
    assert reconstruct_rank_bounds(s)[0][1] == (1, 1)


def test_weight_validation():
    s = new_summary(0.1, "gk")
    with pytest.raises(ValueError):
        insert(s, 1, 2)
    w = new_summary(0.1, "wgk")
    for bad in (0, -3, MAX_WEIGHT + 1):
        with pytest.raises(ValueError):
            insert(w, 1, bad)
    with pytest.raises(TypeError):
        insert(w, 1, 1.5)
    w.total_weight = 2**64 - 2
    with pytest.raises(OverflowError):
        insert(w, 1, 5)


def test_cannot_delete_sentinel():
    s = new_summary(0.1)
    with pytest.raises(ValueError):
        delete_entry(s, s.sentinel)


def test_delete_unit_entry_adds_one():
    s = new_summary(0.1, "gk")
    insert(s, 1)
    insert(s, 2)
    before = entry(s, 2).g
    delete_entry(s, entry(s, 1))
    assert entry(s, 2).g == before + 1


def test_equal_values_keep_arrival_order():
    s = new_summary(0.1, "wgk")
    for w in (1, 2, 3):
        insert(s, 7, w)
    assert [e.weight for e in s.entries] == [1, 2, 3]
    assert [b.rmin for _, b, _ in reconstruct_rank_bounds(s)] == [1, 2, 4, 7]


def test_algorithm_tags():
    assert Algorithm.parse("WGK") is Algorithm.WGK
    assert Algorithm.GK.segment_rule and not Algorithm.GK.weighted
    assert Algorithm.WGREEDY.weighted and not Algorithm.WGREEDY.segment_rule
    with pytest.raises(ValueError):
        Algorithm.parse("tdigest")


ops = st.lists(st.tuples(st.booleans(), st.integers(0, 50), st.integers(1, 20), st.integers(0, 10**6)),
               min_size=1, max_size=80)


@settings(max_examples=150, deadline=None)
@given(ops)
def test_random_ops_preserve_bounds_and_conservation(script):
    s = new_summary(Fraction(1, 5), "wgk")
    for is_delete, value, weight, pick in script:
        if is_delete and s.entries:
            victim = s.entries[pick % len(s.entries)]
            idx = s.entries.index(victim)
            before = reconstruct_rank_bounds(s)
            delete_entry(s, victim)
            after = reconstruct_rank_bounds(s)
            assert after == before[:idx] + before[idx + 1:]
        else:
            insert(s, value, weight)
        rows = reconstruct_rank_bounds(s)
        assert sum(e.G for e in s.ordered()) == s.total_weight + 1
        assert rows[-1][1] == (s.total_weight + 1, s.total_weight + 1)
        prev_last = 0
        for _, b, w in rows:
            assert b.rmin > prev_last and b.rmin <= b.rmax
            prev_last = b.rmin + w - 1


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 30), st.integers(0, 30), st.integers(1, 9)), min_size=1, max_size=20))
def test_reconstruction_matches_direct_formula(rows):
    s = SummaryState.from_entries(3, "wgk", [(i, g, d, w) for i, (g, d, w) in enumerate(rows)])
    got = reconstruct_rank_bounds(s)[:-1]
    for i, (g, d, w) in enumerate(rows):
        rmin = g + sum(gj + wj - 1 for gj, _, wj in rows[:i])
        assert got[i][1] == (rmin, rmin + d)
