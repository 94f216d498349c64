from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynmwm import _pykernels, kernels

native = pytest.mark.skipif(kernels._native is None, reason="compiled kernels not built")


@st.composite
def dense_instances(draw, max_n: int = 10, max_w: int = 50):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return n, [(i, j, draw(st.integers(1, max_w))) for i, j in chosen]


@st.composite
def chains(draw):
    cycle = draw(st.booleans())
    L = draw(st.integers(3 if cycle else 0, 14))
    ws = draw(st.lists(st.integers(1, 9), min_size=L, max_size=L))
    return ws, cycle


def test_scale_to_ints_preserves_order():
    ws = [Fraction(1, 3), Fraction(1, 2), Fraction(2)]
    assert kernels.scale_to_ints(ws) == [2, 3, 12]


def test_overflow_routes_to_python():
    big = [(0, 1, 1 << 62), (1, 2, 1 << 62)]
    assert kernels._pick(None, [w for _, _, w in big]) is _pykernels
    assert kernels.mwm_bitmask(3, big)[0] == 1 << 62


def test_bitmask_small_example():
    opt, mate = _pykernels.mwm_bitmask(4, [(0, 1, 1), (1, 2, 1), (2, 3, 3)])
    assert opt == 4 and mate == [1, 0, 3, 2]


def test_cycle_needs_three_edges():
    with pytest.raises(ValueError):
        _pykernels.path_cycle_value([1, 2], True, [-1, -1])


@native
@given(dense_instances())
def test_bitmask_parity(inst):
    n, edges = inst
    assert kernels._native.mwm_bitmask(n, list(edges)) == _pykernels.mwm_bitmask(n, list(edges))


@native
@given(chains(), st.randoms(use_true_random=False))
def test_path_cycle_parity(chain, rnd):
    ws, cycle = chain
    order = list(range(len(ws)))
    rnd.shuffle(order)
    state = [rnd.choice([-1, -1, 0, 1]) for _ in ws]
    assert kernels._native.path_cycle_value(ws, cycle, state) == _pykernels.path_cycle_value(ws, cycle, state)
    assert kernels._native.path_cycle_lexmin(ws, cycle, order) == _pykernels.path_cycle_lexmin(ws, cycle, order)


@given(chains())
def test_path_value_matches_bitmask(chain):
    ws, cycle = chain
    L = len(ws)
    n = L if cycle else L + 1
    edges = [(i, (i + 1) % n, w) for i, w in enumerate(ws)]
    assert _pykernels.path_cycle_value(ws, cycle, [-1] * L) == _pykernels.mwm_bitmask(n, edges)[0]
