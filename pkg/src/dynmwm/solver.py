"""Common interface for dynamic matchers plus oracle-backed reference solvers.

A dynamic matcher owns a :class:`DynamicGraph` and a :class:`Matching`.
``insert``/``delete`` mutate both and return the :class:`MatchingDelta` of
the maintained matching.  ``mate`` is the vertex-match query.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Optional

from .graph import (
    DynamicGraph,
    EdgeKey,
    GraphError,
    Matching,
    MatchingDelta,
    UpdateEvent,
    WeightedEdge,
    WeightLike,
    apply_delta,
    as_weight,
    diff_matchings,
    edge_key,
)
from .oracle import BudgetExceeded, OracleBudget, mwm_any, mwm_exact_general


class DynamicMatcher:
    """Base class; subclasses implement ``_insert`` and ``_delete``."""

    name = "base"

    def __init__(self) -> None:
        self.graph = DynamicGraph()
        self.matching = Matching()

    # public API -------------------------------------------------------------

    def initialize(self, edges: Iterable[WeightedEdge]) -> MatchingDelta:
        """Load an initial edge set.  The default feeds edges one at a time."""
        out = MatchingDelta()
        for e in edges:
            out.extend(self.insert(e.u, e.v, e.w))
        return out

    def insert(self, u: int, v: int, w: WeightLike) -> MatchingDelta:
        w = as_weight(w)
        key = edge_key(u, v)
        if key in self.graph:
            raise GraphError(f"duplicate insert of edge {key}")
        return self._insert(key[0], key[1], w)

    def delete(self, u: int, v: int) -> MatchingDelta:
        key = edge_key(u, v)
        if key not in self.graph:
            raise GraphError(f"delete of missing edge {key}")
        return self._delete(key[0], key[1])

    def update(self, ev: UpdateEvent) -> MatchingDelta:
        e = ev.edge
        if ev.is_insert:
            return self.insert(e.u, e.v, e.w)
        if e.key in self.graph and self.graph.weight(e.u, e.v) != e.w:
            raise GraphError(f"delete weight {e.w} disagrees with stored weight for {e.key}")
        return self.delete(e.u, e.v)

    def mate(self, v: int) -> Optional[int]:
        return self.matching.mate(v)

    # hooks ------------------------------------------------------------------

    def _insert(self, u: int, v: int, w: Fraction) -> MatchingDelta:
        raise NotImplementedError

    def _delete(self, u: int, v: int) -> MatchingDelta:
        raise NotImplementedError

    def _replace(self, new: Matching) -> MatchingDelta:
        delta = diff_matchings(self.matching, new)
        apply_delta(self.matching, delta)
        return delta


MatcherFactory = Callable[[Fraction, Fraction], DynamicMatcher]
"""``factory(eps, W)`` builds a fresh inner solver for weights in ``[1, W]``."""


class OracleSolver(DynamicMatcher):
    """Exact MWM recomputed on the components touched by each update.

    With ``alternate=True`` the tie-break flips orientation on every update
    so that equal-weight optima are swapped as often as possible; this is the
    deliberately high-recourse inner solver used to exercise the
    low-recourse wrapper.
    """

    name = "oracle"

    def __init__(self, budget: Optional[OracleBudget] = None, alternate: bool = False) -> None:
        super().__init__()
        self.budget = budget
        self.alternate = alternate
        self._flip = False

    def initialize(self, edges: Iterable[WeightedEdge]) -> MatchingDelta:
        for e in edges:
            self.graph.add_edge(e.u, e.v, e.w)
        return self._replace(self._solve(self.graph))

    def _solve(self, g: DynamicGraph) -> Matching:
        if self.alternate:
            self._flip = not self._flip
            return mwm_any(g, self.budget, reverse=self._flip)
        return mwm_any(g, self.budget)

    def _recompute_around(self, touched: tuple[int, int], full: bool = False) -> MatchingDelta:
        if full or self.alternate:
            return self._replace(self._solve(self.graph))
        sub = self.graph.subgraph(self._reach(touched))
        verts = set(sub.vertices()) | set(touched)
        local = self._solve(sub)
        new = Matching((k, w) for k, w in self.matching.items() if k[0] not in verts and k[1] not in verts)
        for k, w in local.items():
            new.add(k[0], k[1], w)
        return self._replace(new)

    def _reach(self, seeds: tuple[int, int]) -> list[EdgeKey]:
        seen = set(seeds)
        stack = list(seeds)
        keys = set()
        while stack:
            x = stack.pop()
            for y in self.graph.neighbors(x):
                keys.add(edge_key(x, y))
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return sorted(keys)

    def _insert(self, u: int, v: int, w: Fraction) -> MatchingDelta:
        self.graph.add_edge(u, v, w)
        return self._recompute_around((u, v))

    def _delete(self, u: int, v: int) -> MatchingDelta:
        self.graph.remove_edge(u, v)
        return self._recompute_around((u, v))


def oracle_factory(budget: Optional[OracleBudget] = None) -> MatcherFactory:
    def make(eps: Fraction, W: Fraction) -> DynamicMatcher:
        return OracleSolver(budget)

    return make


def churn_factory(budget: Optional[OracleBudget] = None) -> MatcherFactory:
    def make(eps: Fraction, W: Fraction) -> DynamicMatcher:
        return OracleSolver(budget, alternate=True)

    return make


class ScaledMatcher(DynamicMatcher):
    """Adapter feeding ``w / unit`` to an inner solver and reporting true weights."""

    def __init__(self, inner: DynamicMatcher, unit: Fraction) -> None:
        super().__init__()
        self.inner = inner
        self.unit = as_weight(unit)
        self.name = f"scaled({inner.name})"

    def _lift(self, delta: MatchingDelta) -> MatchingDelta:
        out = MatchingDelta(list(delta.removed), [(k, self.graph.weight(*k)) for k, _ in delta.added])
        apply_delta(self.matching, out)
        return out

    def initialize(self, edges: Iterable[WeightedEdge]) -> MatchingDelta:
        edges = list(edges)
        for e in edges:
            self.graph.add_edge(e.u, e.v, e.w)
        return self._lift(self.inner.initialize(WeightedEdge(e.u, e.v, e.w / self.unit) for e in edges))

    def _insert(self, u: int, v: int, w: Fraction) -> MatchingDelta:
        self.graph.add_edge(u, v, w)
        return self._lift(self.inner.insert(u, v, w / self.unit))

    def _delete(self, u: int, v: int) -> MatchingDelta:
        self.graph.remove_edge(u, v)
        return self._lift(self.inner.delete(u, v))


def exact_reference(g: DynamicGraph, budget: Optional[OracleBudget] = None) -> Matching:
    """Exact MWM for audits: lexicographic DP when possible, else any exact method."""
    try:
        return mwm_exact_general(g, budget)
    except BudgetExceeded:
        return mwm_any(g, budget)
