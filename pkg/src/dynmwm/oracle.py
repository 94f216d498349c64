"""Exact and static reference matchers.

Everything here recomputes from scratch.  The exact solvers work one
connected component at a time: paths and cycles go through a linear DP,
small components through a bitmask DP, and bipartite components through an
assignment solver.  Ties between optimal matchings are broken towards the
lexicographically smallest *mate vector* (vertices ascending, each mapped to
its partner, unmatched sorting last).  Among optima of equal size this is the
lexicographically smallest sorted edge list.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional

import networkx as nx
import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from . import kernels
from .graph import DynamicGraph, EdgeKey, GraphError, Matching, _check_eps, as_weight

_FLOAT_EXACT = 1 << 53


class BudgetExceeded(RuntimeError):
    """A brute-force oracle was asked to solve an instance above its budget."""


@dataclass(frozen=True)
class OracleBudget:
    """Vertex limits per connected component for the exact oracles."""

    general: int = 20
    bipartite: int = 2000

    def __post_init__(self) -> None:
        if not (0 <= self.general <= 20):
            raise ValueError(f"general budget must lie in [0, 20], got {self.general}")
        if self.bipartite < 0:
            raise ValueError("bipartite budget must be non-negative")

    @classmethod
    def from_env(cls) -> "OracleBudget":
        """Read ``DYNMWM_ORACLE_BUDGET="general,bipartite"`` (either part optional)."""
        raw = os.environ.get("DYNMWM_ORACLE_BUDGET", "").strip()
        if not raw:
            return cls()
        parts = [p.strip() for p in raw.split(",")]
        general = int(parts[0]) if parts[0] else cls.general
        bip = int(parts[1]) if len(parts) > 1 and parts[1] else cls.bipartite
        return cls(general, bip)


def default_budget() -> OracleBudget:
    return OracleBudget.from_env()


# --- component helpers -------------------------------------------------------


@dataclass
class Component:
    vertices: list[int]
    edges: list[tuple[EdgeKey, Fraction]]

    @property
    def is_path_or_cycle(self) -> bool:
        deg: dict[int, int] = {}
        for (u, v), _ in self.edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        return all(d <= 2 for d in deg.values())

    @property
    def is_cycle(self) -> bool:
        return len(self.edges) == len(self.vertices) and self.is_path_or_cycle


def components(g: DynamicGraph) -> list[Component]:
    out = []
    for verts in g.components():
        vs = set(verts)
        edges = [(k, w) for k, w in g.items() if k[0] in vs]
        out.append(Component(verts, edges))
    return out


def walk_order(comp: Component, reverse: bool = False) -> list[tuple[EdgeKey, Fraction]]:
    """Edges of a path or cycle in traversal order.

    Paths start at the endpoint with the smaller id; cycles start at the
    smallest vertex heading towards its smaller neighbour.  ``reverse``
    mirrors vertex ids, which the alternating-tie solvers use.
    """
    sign = -1 if reverse else 1
    adj: dict[int, list[tuple[int, EdgeKey, Fraction]]] = {}
    for key, w in comp.edges:
        u, v = key
        adj.setdefault(u, []).append((v, key, w))
        adj.setdefault(v, []).append((u, key, w))
    if not comp.edges:
        return []
    ends = [x for x, a in adj.items() if len(a) == 1]
    if ends:
        start = min(ends, key=lambda x: sign * x)
    else:
        start = min(adj, key=lambda x: sign * x)
    order = []
    prev_key: Optional[EdgeKey] = None
    cur = start
    while True:
        nxt = [t for t in adj[cur] if t[1] != prev_key]
        if not nxt:
            break
        nxt.sort(key=lambda t: sign * t[0])
        x, key, w = nxt[0]
        if order and key == order[0][0]:
            break
        order.append((key, w))
        prev_key = key
        cur = x
        if len(order) == len(comp.edges):
            break
    return order


def _lex_rank(key: EdgeKey, reverse: bool) -> tuple[int, int]:
    if not reverse:
        return key
    a, b = -key[1], -key[0]
    return (a, b)


def _solve_path_cycle(comp: Component, reverse: bool = False) -> list[EdgeKey]:
    seq = walk_order(comp, reverse)
    ints = kernels.scale_to_ints([w for _, w in seq])
    order = sorted(range(len(seq)), key=lambda i: _lex_rank(seq[i][0], reverse))
    _, chosen = kernels.path_cycle_lexmin(ints, comp.is_cycle, order)
    return [seq[i][0] for i in chosen]


def _solve_bitmask(comp: Component, reverse: bool = False) -> list[EdgeKey]:
    verts = sorted(comp.vertices, reverse=reverse)
    idx = {v: i for i, v in enumerate(verts)}
    ints = kernels.scale_to_ints([w for _, w in comp.edges])
    edges = [(idx[u], idx[v], x) for ((u, v), _), x in zip(comp.edges, ints)]
    _, mate = kernels.mwm_bitmask(len(verts), edges)
    keys = []
    for i, j in enumerate(mate):
        if j > i:
            a, b = verts[i], verts[j]
            keys.append((a, b) if a < b else (b, a))
    return keys


def bipartition(g: DynamicGraph, vertices: Optional[Iterable[int]] = None) -> Optional[dict[int, int]]:
    """Two-colouring ``{vertex: 0 | 1}`` of the non-isolated vertices, or ``None``."""
    color: dict[int, int] = {}
    for s in (g.vertices() if vertices is None else vertices):
        if s in color:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            x = stack.pop()
            for y in g.neighbors(x):
                if y not in color:
                    color[y] = 1 - color[x]
                    stack.append(y)
                elif color[y] == color[x]:
                    return None
    return color


def _solve_assignment(comp: Component, sides: Mapping[int, int]) -> list[EdgeKey]:
    left = sorted(v for v in comp.vertices if sides[v] == 0)
    right = sorted(v for v in comp.vertices if sides[v] == 1)
    li = {v: i for i, v in enumerate(left)}
    ri = {v: i for i, v in enumerate(right)}
    ints = kernels.scale_to_ints([w for _, w in comp.edges])
    if sum(ints) >= _FLOAT_EXACT:
        return _solve_blossom(comp)
    mat = np.zeros((len(left), len(right)), dtype=np.float64)
    for ((u, v), _), x in zip(comp.edges, ints):
        if sides[u] == 0:
            mat[li[u], ri[v]] = x
        else:
            mat[li[v], ri[u]] = x
    rows, cols = linear_sum_assignment(mat, maximize=True)
    keys = []
    for r, c in zip(rows, cols):
        if mat[r, c] > 0:
            a, b = left[r], right[c]
            keys.append((a, b) if a < b else (b, a))
    return keys


def _solve_blossom(comp: Component) -> list[EdgeKey]:
    ints = kernels.scale_to_ints([w for _, w in comp.edges])
    h = nx.Graph()
    for ((u, v), _), x in zip(comp.edges, ints):
        h.add_edge(u, v, weight=x)
    return sorted((min(a, b), max(a, b)) for a, b in nx.max_weight_matching(h))


def _assemble(g: DynamicGraph, keys: Iterable[EdgeKey]) -> Matching:
    return Matching((k, g.weight(*k)) for k in sorted(keys))


# --- public oracles ----------------------------------------------------------


def mwm_exact_general(g: DynamicGraph, budget: Optional[OracleBudget] = None, reverse: bool = False) -> Matching:
    """Maximum weight matching by exhaustive DP, with the lexicographic tie-break.

    Raises :class:`BudgetExceeded` if a component that is neither a path nor a
    cycle has more vertices than ``budget.general``.  ``reverse`` breaks ties
    as if vertex ids were negated.
    """
    budget = budget or default_budget()
    keys: list[EdgeKey] = []
    for comp in components(g):
        if comp.is_path_or_cycle:
            keys.extend(_solve_path_cycle(comp, reverse))
        elif len(comp.vertices) <= budget.general:
            keys.extend(_solve_bitmask(comp, reverse))
        else:
            raise BudgetExceeded(
                f"component with {len(comp.vertices)} vertices exceeds general budget {budget.general}"
            )
    return _assemble(g, keys)


def mwm_exact_bipartite(g: DynamicGraph, sides: Optional[Mapping[int, int]] = None, budget: Optional[OracleBudget] = None) -> Matching:
    """Exact MWM on a bipartite graph through an assignment solver.

    ``sides`` maps vertices to 0/1; when omitted a two-colouring is computed.
    Optimal weight is guaranteed; among ties no particular order is promised.
    """
    budget = budget or default_budget()
    if sides is None:
        sides = bipartition(g)
        if sides is None:
            raise GraphError("graph is not bipartite")
    for (u, v), _ in g.items():
        if u not in sides or v not in sides or sides[u] == sides[v]:
            raise GraphError(f"edge {(u, v)} does not cross the given bipartition")
    keys: list[EdgeKey] = []
    for comp in components(g):
        if len(comp.vertices) > budget.bipartite:
            raise BudgetExceeded(
                f"component with {len(comp.vertices)} vertices exceeds bipartite budget {budget.bipartite}"
            )
        keys.extend(_solve_assignment(comp, sides))
    return _assemble(g, keys)


def mwm_path_cycle(g: DynamicGraph, reverse: bool = False) -> Matching:
    """Exact MWM of a single simple path or cycle by linear DP."""
    comps = components(g)
    if len(comps) > 1:
        raise GraphError("input is disconnected")
    if not comps:
        return Matching()
    if not comps[0].is_path_or_cycle:
        raise GraphError("input has a vertex of degree above two")
    return _assemble(g, _solve_path_cycle(comps[0], reverse))


def mwm_any(g: DynamicGraph, budget: Optional[OracleBudget] = None, reverse: bool = False) -> Matching:
    """Exact MWM using the cheapest exact method per component.

    The lexicographic tie-break holds on components solved by the DP
    kernels; bipartite and general fallbacks only guarantee optimality.
    """
    budget = budget or default_budget()
    keys: list[EdgeKey] = []
    for comp in components(g):
        if comp.is_path_or_cycle:
            keys.extend(_solve_path_cycle(comp, reverse))
        elif len(comp.vertices) <= budget.general:
            keys.extend(_solve_bitmask(comp, reverse))
        else:
            sub = g.subgraph(k for k, _ in comp.edges)
            sides = bipartition(sub)
            if sides is not None and len(comp.vertices) <= budget.bipartite:
                keys.extend(_solve_assignment(comp, sides))
            else:
                keys.extend(_solve_blossom(comp))
    return _assemble(g, keys)


def max_weight(g: DynamicGraph, budget: Optional[OracleBudget] = None) -> Fraction:
    """The exact optimum value of a maximum weight matching."""
    return mwm_any(g, budget).total


def approx_mwm_static(g: DynamicGraph, eps: Fraction, budget: Optional[OracleBudget] = None) -> Matching:
    """Static matching with ``w >= (1 - eps) * opt``.

    The default implementation is exact (DP, assignment or blossom per
    component), which meets the contract for every ``eps``.
    """
    _check_eps(as_weight(eps))
    return mwm_any(g, budget)


def max_cardinality_matching(g: DynamicGraph, sides: Optional[Mapping[int, int]] = None) -> list[EdgeKey]:
    """Maximum cardinality matching, ignoring weights."""
    if g.m == 0:
        return []
    if sides is None:
        sides = bipartition(g)
    if sides is not None:
        left = sorted(v for v in g.vertices() if sides[v] == 0)
        right = sorted(v for v in g.vertices() if sides[v] == 1)
        li = {v: i for i, v in enumerate(left)}
        ri = {v: i for i, v in enumerate(right)}
        rows, cols = [], []
        for (u, v), _ in g.items():
            if sides[u] == 0:
                rows.append(li[u]), cols.append(ri[v])
            else:
                rows.append(li[v]), cols.append(ri[u])
        mat = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(len(left), len(right)))
        match = maximum_bipartite_matching(mat, perm_type="column")
        keys = []
        for r, c in enumerate(match):
            if c >= 0:
                a, b = left[r], right[c]
                keys.append((a, b) if a < b else (b, a))
        return sorted(keys)
    h = nx.Graph()
    h.add_edges_from(g.keys())
    return sorted((min(a, b), max(a, b)) for a, b in nx.max_weight_matching(h, maxcardinality=True, weight=None))


# --- enumeration -------------------------------------------------------------


def iter_matchings(g: DynamicGraph, budget: Optional[OracleBudget] = None) -> Iterator[list[EdgeKey]]:
    """Every matching of ``g`` (including the empty one), as sorted key lists."""
    budget = budget or default_budget()
    if len(g.vertices()) > budget.general:
        raise BudgetExceeded(f"{len(g.vertices())} vertices exceed enumeration budget {budget.general}")
    keys = g.keys()
    used: set[int] = set()
    chosen: list[EdgeKey] = []

    def rec(i: int) -> Iterator[list[EdgeKey]]:
        if i == len(keys):
            yield list(chosen)
            return
        u, v = keys[i]
        if u not in used and v not in used:
            used.update((u, v))
            chosen.append(keys[i])
            yield from rec(i + 1)
            chosen.pop()
            used.difference_update((u, v))
        yield from rec(i + 1)

    yield from rec(0)


def enumerate_approx_mwms(
    g: DynamicGraph,
    eps: Fraction,
    budget: Optional[OracleBudget] = None,
    mode: str = "maximal",
) -> list[Matching]:
    """All matchings of weight at least ``(1 - eps) * opt`` of a given shape.

    ``mode="maximal"`` keeps inclusion-maximal matchings; ``"minimal"`` keeps
    those from which no edge can be dropped without falling below the
    threshold (the adversary's choices when only unions matter);
    ``"all"`` keeps everything above the threshold.
    """
    eps = as_weight(eps)
    if not (0 <= eps < 1):
        raise ValueError("eps must lie in [0, 1)")
    if mode not in ("maximal", "minimal", "all"):
        raise ValueError(f"unknown mode {mode!r}")
    opt = mwm_exact_general(g, budget).total
    threshold = (1 - eps) * opt
    w = g.weight_map()
    out = []
    for keys in iter_matchings(g, budget):
        total = sum((w[k] for k in keys), Fraction(0))
        if total < threshold:
            continue
        if mode == "maximal":
            cov = {x for k in keys for x in k}
            if any(u not in cov and v not in cov for (u, v) in w):
                continue
        elif mode == "minimal":
            if keys and total - min(w[k] for k in keys) >= threshold:
                continue
        out.append(_assemble(g, keys))
    return out
