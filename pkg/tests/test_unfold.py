from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynmwm.graph import DynamicGraph, GraphError, Matching
from dynmwm.oracle import max_cardinality_matching, mwm_any
from dynmwm.unfold import BdlSolver, base_of, copy_id, copy_keys, refold, unfold

from .conftest import A, B, C, D
from .strategies import graphs


def test_copy_ids_roundtrip():
    for u in range(5):
        for i in range(1, 4):
            assert base_of(copy_id(u, i, 3), 3) == (u, i)


def test_copy_keys():
    # u^1 v^2, u^2 v^1 for w = 2
    assert copy_keys(0, 1, 2, 3) == [(0, 4), (1, 3)]


def test_path4_unfolding():
    g = DynamicGraph.from_triples([(A, B, 1), (B, C, 1), (C, D, 5)])
    u = unfold(g)
    assert u.W == 5 and u.n == 20 and u.m == 7


def test_fractional_weight_rejected(path4):
    with pytest.raises(GraphError):
        unfold(path4, W=2)


def test_refold_keeps_edge_if_any_copy_present():
    g = DynamicGraph.from_triples([(0, 1, 3), (1, 2, 2)])
    u = unfold(g, W=3)
    h = refold([copy_keys(0, 1, 3, 3)[1]], u)
    assert h.keys() == [(0, 1)] and h.weight(0, 1) == 3
    with pytest.raises(GraphError):
        refold([(100, 101)], u)


@settings(max_examples=200)
@given(graphs(max_n=8, weight=st.integers(1, 6).map(Fraction), bipartite=True))
def test_unfolding_identities(g):
    W = int(max((w for _, w in g.items()), default=1))
    u = unfold(g, W)
    assert u.n == W * len(g.vertices())
    assert u.m == sum(int(w) for _, w in g.items())
    assert mwm_any(g).total == len(max_cardinality_matching(u.graph))


def bdl_trace(eps: Fraction, steps: int, seed: int, W: int = 6, n: int = 10, bipartite: bool = True) -> Fraction:
    rng = random.Random(seed)
    s = BdlSolver(eps, W)
    worst = Fraction(1)
    for _ in range(steps):
        keys = s.graph.keys()
        if keys and rng.random() < 0.35:
            s.delete(*rng.choice(keys))
        else:
            u, v = rng.sample(range(n), 2)
            if bipartite and u % 2 == v % 2:
                v = (v + 1) % n
                if u == v:
                    continue
            if s.graph.has_edge(u, v):
                continue
            s.insert(u, v, rng.randint(1, W))
        s.check_cadence()
        assert s.matching.is_valid_in(s.graph)
        opt = mwm_any(s.graph).total
        if opt:
            worst = min(worst, s.matching.total / opt)
            assert s.matching.total >= s.ratio_floor() * opt
    return worst


def test_bdl_bipartite_trace():
    assert bdl_trace(Fraction(1, 10), 300, seed=1) >= Fraction(1, 2)


def test_bdl_general_trace():
    assert bdl_trace(Fraction(1, 10), 200, seed=2, bipartite=False) >= Fraction(1, 2)


def test_bdl_floor():
    s = BdlSolver(Fraction(1, 10), 4)
    assert s.ratio_floor() == Fraction(1, 2)
    s.insert(0, 1, 1)
    s.insert(1, 2, 1)
    s.insert(0, 2, 1)
    assert s.ratio_floor() == Fraction(1, 3)


def test_bdl_rejects_heavy_edge():
    with pytest.raises(GraphError):
        BdlSolver(Fraction(1, 10), 4).insert(0, 1, 5)
