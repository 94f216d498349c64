from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynmwm.graph import DynamicGraph, GraphError, WeightInterval, restrict
from dynmwm.oracle import (
    BudgetExceeded,
    OracleBudget,
    approx_mwm_static,
    bipartition,
    enumerate_approx_mwms,
    iter_matchings,
    max_cardinality_matching,
    mwm_any,
    mwm_exact_bipartite,
    mwm_exact_general,
    mwm_path_cycle,
)

from .conftest import A, B, C, D
from .strategies import graphs, paths_or_cycles


def brute(g: DynamicGraph) -> Fraction:
    w = g.weight_map()
    return max(sum((w[k] for k in m), Fraction(0)) for m in iter_matchings(g))


def test_path4_exact(path4):
    m = mwm_exact_general(path4)
    assert m.keys() == {(A, B), (C, D)} and m.total == Fraction(5, 2)


def test_empty_and_triangle():
    assert mwm_exact_general(DynamicGraph()).total == 0
    tri = DynamicGraph.from_triples([(0, 1, 1), (1, 2, 1), (0, 2, 1)])
    m = mwm_exact_general(tri)
    assert len(m) == 1 and m.total == 1


def test_bipartite_examples(path4):
    assert mwm_exact_bipartite(DynamicGraph.from_triples([(0, 1, 7)])).keys() == {(0, 1)}
    k22 = DynamicGraph.from_triples([(0, 2, 5), (0, 3, 1), (1, 2, 1), (1, 3, 5)])
    assert mwm_exact_bipartite(k22).total == 10
    assert mwm_exact_bipartite(path4).total == Fraction(5, 2)


def test_bipartite_rejects_odd_cycle():
    tri = DynamicGraph.from_triples([(0, 1, 1), (1, 2, 1), (0, 2, 1)])
    with pytest.raises(GraphError):
        mwm_exact_bipartite(tri)


def test_path_cycle_examples(path4):
    p = DynamicGraph.from_triples([(0, 1, 1), (1, 2, 2), (2, 3, 1)])
    m = mwm_path_cycle(p)
    assert m.keys() == {(0, 1), (2, 3)} and m.total == 2
    assert mwm_path_cycle(path4).keys() == {(A, B), (C, D)}
    cyc = DynamicGraph.from_triples([(0, 1, 4), (1, 2, 5), (0, 2, 6)])
    assert mwm_path_cycle(cyc).keys() == {(0, 2)}


def test_path_cycle_rejects_branching():
    star = DynamicGraph.from_triples([(0, 1, 1), (0, 2, 1), (0, 3, 1)])
    with pytest.raises(GraphError):
        mwm_path_cycle(star)


def test_approx_static_examples(path4):
    eps = Fraction(1, 10)
    assert approx_mwm_static(path4, eps).total >= Fraction(9, 4)
    star = DynamicGraph.from_triples([(0, 1, 3), (0, 2, 5), (0, 3, 4)])
    assert approx_mwm_static(star, eps).total >= (1 - eps) * 5


def test_enumerate_examples(path4):
    low = restrict(path4, WeightInterval(1, Fraction(3, 2)))
    found = {frozenset(m.keys()) for m in enumerate_approx_mwms(low, Fraction(0))}
    assert found == {frozenset({(A, B)}), frozenset({(B, C)})}
    single = DynamicGraph.from_triples([(0, 1, 2)])
    assert len(enumerate_approx_mwms(single, Fraction(1, 2))) == 1
    c4 = DynamicGraph.from_triples([(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)])
    found = {frozenset(m.keys()) for m in enumerate_approx_mwms(c4, Fraction(0))}
    assert found == {frozenset({(0, 1), (2, 3)}), frozenset({(1, 2), (0, 3)})}


def test_budget_is_enforced():
    g = DynamicGraph.from_triples([(i, i + 1, 1) for i in range(0, 30, 2)] + [(i, i + 2, 2) for i in range(0, 28)])
    with pytest.raises(BudgetExceeded):
        mwm_exact_general(g, OracleBudget(general=8))


def test_budget_from_env(monkeypatch):
    monkeypatch.setenv("DYNMWM_ORACLE_BUDGET", "12,500")
    assert OracleBudget.from_env() == OracleBudget(12, 500)


@given(graphs(max_n=8, bipartite=True))
def test_bipartite_agrees_with_general(g):
    assert mwm_exact_bipartite(g).total == mwm_exact_general(g).total


@given(paths_or_cycles())
def test_path_cycle_agrees_with_general(g):
    a, b = mwm_path_cycle(g), mwm_exact_general(g)
    assert a.total == b.total
    assert a.keys() == b.keys()


@given(graphs(max_n=8))
def test_exact_matches_enumeration(g):
    m = mwm_exact_general(g)
    assert m.is_valid_in(g)
    assert m.total == brute(g)
    assert mwm_any(g).total == m.total


@given(graphs(max_n=7), st.sampled_from([Fraction(1, 6), Fraction(1, 10)]))
def test_approx_static_contract(g, eps):
    assert approx_mwm_static(g, eps).total >= (1 - eps) * mwm_exact_general(g).total


@given(graphs(max_n=8))
def test_ties_prefer_lexicographically_smallest_mates(g):
    best = mwm_exact_general(g).total
    w = g.weight_map()
    optimal = [m for m in iter_matchings(g) if sum((w[k] for k in m), Fraction(0)) == best]

    def mates(keys):
        mate = {}
        for u, v in keys:
            mate[u], mate[v] = v, u
        return [mate.get(x, math.inf) for x in sorted(g.vertices())]

    assert mates(mwm_exact_general(g).keys()) == min(mates(m) for m in optimal)


@given(graphs(max_n=8))
def test_max_cardinality(g):
    keys = max_cardinality_matching(g)
    best = max(len(m) for m in iter_matchings(g))
    assert len(keys) == best


def test_bipartition_of_path4(path4):
    sides = bipartition(path4)
    assert sides is not None and sides[A] != sides[B] and sides[B] != sides[C]
