from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynmwm.graph import DynamicGraph, Matching
from dynmwm.low_recourse import (
    LowRecourseSolver,
    dyadic_bucket,
    lr_build_trees,
    lr_direct_transform,
    lr_wrap,
    tree_depth_cap,
)
from dynmwm.oracle import iter_matchings, mwm_any
from dynmwm.solver import churn_factory, oracle_factory

from .conftest import A, B, C, D


def _m(pairs) -> Matching:
    return Matching(((min(u, v), max(u, v)), Fraction(w)) for u, v, w in pairs)


def test_dyadic_bucket():
    assert dyadic_bucket(Fraction(1)) == 0
    assert dyadic_bucket(Fraction(7)) == 2
    assert dyadic_bucket(Fraction(8)) == 3
    assert dyadic_bucket(Fraction(1, 3)) == -2
    assert dyadic_bucket(Fraction(0)) < -1000


def test_tree_depth_cap():
    assert tree_depth_cap(Fraction(1), Fraction(1, 10)) == 1
    assert tree_depth_cap(Fraction(16), Fraction(1, 2)) == 6


def test_transform_without_updates_keeps_prev(path4):
    prev = _m([(A, B, 1), (C, D, Fraction(3, 2))])
    cur = _m([(B, C, 1)])
    assert lr_direct_transform(prev, cur, [], Fraction(1, 4)) == prev


def test_transform_identity():
    m = _m([(0, 1, 3), (2, 3, 4)])
    assert lr_direct_transform(m, m.copy(), [(0, 1)], Fraction(1, 4)) == m


def test_transform_takes_updated_component(path4):
    prev = _m([(B, C, 1)])
    cur = _m([(A, B, 1), (C, D, Fraction(3, 2))])
    out = lr_direct_transform(prev, cur, [(C, D)], Fraction(1, 2))
    assert out == cur


def test_transform_cuts_long_alternating_path():
    # alternating path of 12 edges; the update sits at one end
    n = 13
    prev = _m([(i, i + 1, 1) for i in range(1, n - 1, 2)])
    cur = _m([(i, i + 1, 1) for i in range(0, n - 1, 2)])
    out = lr_direct_transform(prev, cur, [(0, 1)], Fraction(1, 2))
    assert (0, 1) in out
    assert out.keys() & prev.keys() and out.keys() & cur.keys()
    moved = len(out.keys() ^ prev.keys())
    assert moved <= 2 * 4 + 2


def _is_matching(m: Matching) -> bool:
    seen: set[int] = set()
    for u, v in m.keys():
        if u in seen or v in seen:
            return False
        seen.update((u, v))
    return True


@settings(max_examples=80)
@given(st.integers(0, 10**6), st.sampled_from([Fraction(1, 2), Fraction(1, 4), Fraction(1, 10)]))
def test_transform_properties(seed, eps):
    rng = random.Random(seed)
    g = DynamicGraph()
    for u in range(9):
        for v in range(u + 1, 9):
            if rng.random() < 0.35:
                g.add_edge(u, v, rng.randint(1, 9))
    ms = list(iter_matchings(g))
    prev = Matching((k, g.weight(*k)) for k in rng.choice(ms))
    cur = Matching((k, g.weight(*k)) for k in rng.choice(ms))
    upd = [k for k in g.keys() if rng.random() < 0.3]
    out = lr_direct_transform(prev, cur, upd, eps)
    assert _is_matching(out)
    assert out.keys() <= prev.keys() | cur.keys()
    # outside updated components nothing moves away from prev
    if not upd:
        assert out == prev


def test_forest_increasing_buckets_form_a_path():
    f = lr_build_trees([0, 1, 2, 3], theta=10)
    assert len(f.roots) == 1 and f.depth() == 3 and f.degree() == 1


def test_forest_decreasing_buckets_open_roots():
    f = lr_build_trees([3, 2, 1, 0], theta=10)
    assert len(f.roots) == 4 and f.depth() == 0


def test_forest_depth_cap():
    f = lr_build_trees([0] * 50, theta=3)
    assert f.depth() <= 3


@given(st.lists(st.integers(-3, 8), max_size=60), st.integers(1, 6))
def test_forest_fathers_have_smaller_bucket(buckets, theta):
    f = lr_build_trees(buckets, theta)
    stack = list(f.roots)
    while stack:
        node = stack.pop()
        assert node.depth <= theta
        for ch in node.children:
            assert node.bucket <= ch.bucket and ch.depth == node.depth + 1
            stack.append(ch)


def run_lr(eps: Fraction, W: int, seed: int, steps: int, n: int = 12, factory=None):
    rng = random.Random(seed)
    s = LowRecourseSolver(eps, Fraction(W), factory or oracle_factory())
    s.initialize([])
    recourse = 0
    for _ in range(steps):
        keys = s.graph.keys()
        if keys and rng.random() < 0.4:
            key = rng.choice(keys)
            had = s.matching.keys()
            d = s.delete(*key)
            if s.stats.phases and key in had and len(d) == 1:
                assert d.removed == [key]
        else:
            u, v = rng.sample(range(n), 2)
            if s.graph.has_edge(u, v):
                continue
            d = s.insert(u, v, rng.randint(1, W))
        recourse += len(d)
        assert s.matching.is_valid_in(s.graph)
    return s, recourse


def test_delete_between_checkpoints_only_drops():
    s = LowRecourseSolver(Fraction(1, 4), Fraction(1), oracle_factory())
    s.initialize([])
    i = 0
    while not (s.t + 1 < s._next and s.t + 1 < s._phase_end and len(s.matching) > 0):
        s.insert(2 * i, 2 * i + 1, 1)
        i += 1
    key = sorted(s.matching.keys())[0]
    d = s.delete(*key)
    assert d.removed == [key] and not d.added


@pytest.mark.parametrize("W", [1, 8, 64])
def test_invariant_counters(W):
    s, _ = run_lr(Fraction(1, 4), W, seed=W, steps=400, n=40)
    assert s.stats.spacing_violations == 0
    assert s.stats.checkpoint_cap_violations == 0
    assert s.stats.max_depth <= s.theta


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_wrapped_churn_stays_valid(seed):
    run_lr(Fraction(1, 3), 16, seed, steps=60, factory=churn_factory())


def test_lr_wrap_factory():
    m = lr_wrap(oracle_factory())(Fraction(1, 4), Fraction(10))
    assert isinstance(m, LowRecourseSolver) and m.theta == tree_depth_cap(Fraction(10), Fraction(1, 4))
