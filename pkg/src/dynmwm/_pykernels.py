"""Pure-Python implementations of the hot kernels.

Every function here has a twin with the identical signature in
``_ckernels.pyx``; :mod:`dynmwm.kernels` picks one at import time.
Weights are non-negative Python ints (callers scale rationals first).
"""

from __future__ import annotations

import sys


def mwm_bitmask(n: int, edges: list[tuple[int, int, int]]) -> tuple[int, list[int]]:
    """Exact maximum weight matching on ``n <= 20`` dense vertices.

    ``edges`` holds ``(i, j, w)`` with ``i != j`` and ``w > 0``.  Returns the
    optimum and a mate array (``-1`` for unmatched).  Among optimal matchings
    the lexicographically smallest sorted edge list is returned: the lowest
    vertex of every sub-problem is matched to its smallest feasible partner
    whenever that keeps the optimum.
    """
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for i, j, w in edges:
        if i > j:
            i, j = j, i
        adj[i].append((j, w))
    for a in adj:
        a.sort()

    memo: dict[int, int] = {0: 0}

    def best(mask: int) -> int:
        r = memo.get(mask)
        if r is not None:
            return r
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        val = best(rest)
        for j, w in adj[i]:
            bj = 1 << j
            if rest & bj:
                c = w + best(rest ^ bj)
                if c > val:
                    val = c
        memo[mask] = val
        return val

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * n + 100))
    try:
        full = (1 << n) - 1
        opt = best(full)
        mate = [-1] * n
        mask = full
        while mask:
            target = memo[mask]
            low = mask & -mask
            i = low.bit_length() - 1
            rest = mask ^ low
            mask = rest
            for j, w in adj[i]:
                bj = 1 << j
                if rest & bj and w + best(rest ^ bj) == target:
                    mate[i], mate[j] = j, i
                    mask = rest ^ bj
                    break
    finally:
        sys.setrecursionlimit(old)
    return opt, mate


def path_cycle_value(weights: list[int], cycle: bool, state: list[int]) -> int:
    """Best matching weight on a path/cycle honoring per-edge constraints.

    ``state[i]`` is ``-1`` (free), ``0`` (forced out) or ``1`` (forced in).
    Edge ``i`` is adjacent to ``i + 1`` (and, on a cycle, edge ``L - 1`` to
    edge ``0``).  Returns ``-1`` when the constraints are infeasible.
    """
    L = len(weights)
    if L == 0:
        return 0
    if not cycle:
        return _path_value(weights, state, 0, L)
    if L < 3:
        raise ValueError("a simple cycle has at least three edges")
    best = -1
    # edge 0 excluded
    if state[0] != 1:
        best = _path_value(weights, state, 1, L)
    # edge 0 included: its neighbours 1 and L-1 are excluded
    if state[0] != 0 and state[1] != 1 and state[L - 1] != 1:
        inner = _path_value(weights, state, 2, L - 1)
        if inner >= 0 and weights[0] + inner > best:
            best = weights[0] + inner
    return best


def _path_value(weights: list[int], state: list[int], lo: int, hi: int) -> int:
    NEG = -1
    out_v, in_v = 0, NEG  # best with previous edge out / in
    for i in range(lo, hi):
        s = state[i]
        prev_best = out_v if out_v > in_v else in_v
        new_in = NEG
        if s != 0 and out_v >= 0:
            new_in = out_v + weights[i]
        new_out = prev_best if s != 1 else NEG
        out_v, in_v = new_out, new_in
    return out_v if out_v > in_v else in_v


def path_cycle_lexmin(weights: list[int], cycle: bool, order: list[int]) -> tuple[int, list[int]]:
    """Optimal matching on a path/cycle, ties broken along ``order``.

    Edges are decided in the sequence ``order``: each is forced in if an
    optimum survives, otherwise forced out.  With ``order`` sorted by edge
    identity this yields the lexicographically smallest optimal edge set.
    Returns ``(optimum, chosen positions ascending)``.
    """
    L = len(weights)
    state = [-1] * L
    opt = path_cycle_value(weights, cycle, state)
    for idx in order:
        state[idx] = 1
        if path_cycle_value(weights, cycle, state) != opt:
            state[idx] = 0
    return opt, [i for i in range(L) if state[i] == 1]
