import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import naive_twin_width, random_graph, random_tree
from twinwidth import Trigraph, TrigraphError, verify, width
from twinwidth.solver import (BUDGET_EXHAUSTED, EXACT, NO, UNKNOWN, UPPER_BOUND_ONLY, YES,
                              SolverBudget, decide_at_most, greedy_upper_bound, tree_sequence,
                              twin_width_exact)
from twinwidth.trigraph import from_edges


def cycle(n):
    return from_edges(n, black=[(i, i % n + 1) for i in range(1, n + 1)])


def path(n):
    return from_edges(n, black=[(i, i + 1) for i in range(1, n)])


@pytest.mark.parametrize("g, value", [
    (path(3), 0), (path(4), 1), (cycle(4), 0), (cycle(5), 2), (cycle(7), 2),
    (from_edges(5, black=[(u, v) for u in range(1, 6) for v in range(u + 1, 6)]), 0),
])
def test_known_values(g, value):
    res = twin_width_exact(g)
    assert res.status == EXACT and res.value == value
    assert verify(res.witness, value).accepted


def test_decide_answers():
    c5 = cycle(5)
    assert decide_at_most(c5, 1).answer == NO
    yes = decide_at_most(c5, 2)
    assert yes.answer == YES and width(yes.witness) <= 2


def test_budget_reporting():
    rng = random.Random(4)
    g = random_graph(rng, 9, 0.5)
    tiny = SolverBudget(max_nodes=1)
    res = twin_width_exact(g, tiny)
    assert res.status in (UPPER_BOUND_ONLY, EXACT)
    assert verify(res.witness, res.value).accepted
    assert decide_at_most(g, 0, tiny).answer in (NO, UNKNOWN)
    with pytest.raises(ValueError):
        SolverBudget(max_nodes=0)


def test_d_cap_gives_budget_exhausted():
    g = random_graph(random.Random(1), 8, 0.5)
    res = twin_width_exact(g, SolverBudget(d_cap=1))
    if greedy_upper_bound(g).value > 2:
        assert res.status == BUDGET_EXHAUSTED
    assert verify(res.witness, res.value).accepted


def test_tree_sequence_rejects_non_trees():
    with pytest.raises(TrigraphError):
        tree_sequence(cycle(4))
    with pytest.raises(TrigraphError):
        tree_sequence(Trigraph([1, 2]))


def test_tree_sequence_on_fifty_vertex_tree():
    t = random_tree(random.Random(50), 50)
    assert width(tree_sequence(t)) <= 2


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10 ** 6))
def test_exact_matches_naive(n, seed):
    rng = random.Random(seed)
    g = random_graph(rng, n, rng.random(), red_p=rng.choice([0.0, 0.3]))
    res = twin_width_exact(g)
    assert res.status == EXACT and res.value == naive_twin_width(g)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.integers(0, 10 ** 6))
def test_greedy_witness_verifies(n, seed):
    g = random_graph(random.Random(seed), n, 0.5)
    res = greedy_upper_bound(g)
    assert verify(res.witness).width == res.value
