from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynmwm.graph import (
    DynamicGraph,
    GraphError,
    Matching,
    MatchingDelta,
    MatchingError,
    UpdateEvent,
    WeightedEdge,
    WeightInterval,
    apply_delta,
    apply_update,
    build_partition,
    diff_matchings,
    restrict,
)

from .conftest import A, B, C, D
from .strategies import graphs


def test_insert_then_delete_round_trips():
    g = DynamicGraph()
    apply_update(g, UpdateEvent.insert(1, 2, 3, 1))
    assert g.m == 1 and g.weight(1, 2) == 3
    apply_update(g, UpdateEvent.delete(1, 2, 3, 2))
    assert g.m == 0


def test_duplicate_insert_rejected():
    g = DynamicGraph()
    apply_update(g, UpdateEvent.insert(1, 2, 5, 1))
    with pytest.raises(GraphError, match="duplicate"):
        apply_update(g, UpdateEvent.insert(1, 2, 7, 2))


def test_missing_delete_rejected():
    with pytest.raises(GraphError):
        apply_update(DynamicGraph(), UpdateEvent.delete(1, 2, 5, 1))


def test_edge_is_canonical_and_positive():
    assert WeightedEdge(5, 2, 1).key == (2, 5)
    with pytest.raises(ValueError):
        WeightedEdge(1, 1, 1)
    with pytest.raises(ValueError):
        WeightedEdge(1, 2, 0)


def test_restrict_path4(path4):
    assert restrict(path4, WeightInterval(1, Fraction(3, 2))).keys() == [(A, B), (B, C)]
    assert restrict(path4, WeightInterval(Fraction(1, 10), 100)) == path4
    assert restrict(path4, WeightInterval(2, 3)).m == 0


def test_degenerate_partition():
    p = build_partition(1, 1, 10, Fraction(1, 10))
    assert [(iv.lo, iv.hi) for iv in p.intervals] == [(1, 10)]


def test_partition_up_to_a_million():
    eps = Fraction(1, 10)
    p = build_partition(1, 10**6, 10, eps)
    assert len(p) == 6
    for i, pad in enumerate(p.padded, start=1):
        assert pad.lo == Fraction(10) ** (i - 1) / 10
        assert pad.hi == Fraction(10) ** (i + 1)


def test_partition_rejects_large_eps():
    with pytest.raises(ValueError):
        build_partition(1, 10, 10, Fraction(1, 5))


@given(
    st.integers(1, 50).map(Fraction),
    st.integers(1, 10**6).map(Fraction),
    st.sampled_from([Fraction(3, 2), Fraction(2), Fraction(10), Fraction(1000)]),
    st.sampled_from([Fraction(1, 6), Fraction(1, 10), Fraction(1, 20)]),
)
def test_partition_covers_and_is_wide(w_min, span, delta, eps):
    w_max = w_min * span
    p = build_partition(w_min, w_max, delta, eps)
    assert p.intervals[0].lo == w_min
    assert all(iv.hi / iv.lo >= delta for iv in p.intervals)
    assert len(p) <= max(1, math.ceil(math.log(span, delta) + 1e-9))
    for w in (w_min, w_max, (w_min + w_max) / 2):
        assert p.class_of(w) is not None
    bound = math.ceil(math.log(float(1 / eps**2), float(delta)) - 1e-9) + 1
    for w in (w_min, w_max, w_min * delta):
        assert len(p.padded_classes_of(w)) <= bound


@given(graphs(max_n=7), st.integers(1, 50).map(Fraction), st.integers(2, 20))
def test_adjacent_restrictions_union(g, lo, mult):
    mid = lo * mult
    hi = mid * mult
    left = restrict(g, WeightInterval(lo, mid))
    right = restrict(g, WeightInterval(mid, hi))
    both = restrict(g, WeightInterval(lo, hi))
    assert set(left.keys()) | set(right.keys()) == set(both.keys())
    assert set(left.keys()).isdisjoint(right.keys())


@given(graphs(max_n=8), st.randoms(use_true_random=False))
def test_matching_total_is_exact(g, rnd):
    m = Matching()
    for _ in range(30):
        keys = g.keys()
        if not keys:
            break
        k = rnd.choice(keys)
        if k in m:
            m.remove(*k)
        elif m.mate(k[0]) is None and m.mate(k[1]) is None:
            m.add(k[0], k[1], g.weight(*k))
        assert m.total == m.recompute_total()
        assert m.is_valid_in(g)


def test_matching_rejects_shared_vertex():
    m = Matching()
    m.add(0, 1, 1)
    with pytest.raises(MatchingError):
        m.add(1, 2, 1)


def test_delta_extend_nets_changes():
    d = MatchingDelta([], [((0, 1), Fraction(1))])
    d.extend(MatchingDelta([(0, 1)], [((1, 2), Fraction(2))]))
    assert d.removed == [] and d.added == [((1, 2), Fraction(2))]


@given(graphs(max_n=6))
def test_diff_then_apply_reproduces(g):
    from dynmwm.oracle import mwm_any

    a, b = mwm_any(g), mwm_any(g, reverse=True)
    d = diff_matchings(a, b)
    m = a.copy()
    apply_delta(m, d)
    assert m == b
    assert len(d) == len(a.keys() ^ b.keys())
