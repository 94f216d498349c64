"""Weighted-to-unweighted reduction by graph unfolding.

An integer-weighted edge ``uv`` of weight ``w`` becomes ``w`` unit edges
``u^i v^(w-i+1)`` between the ``W`` copies of its endpoints.  Copy ``i`` of
base vertex ``u`` has id ``u * W + i - 1``.  ``BdlSolver`` keeps an
unweighted matching of the unfolded graph and periodically rebuilds a
weighted matching on its refolding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .graph import (
    DynamicGraph,
    EdgeKey,
    GraphError,
    Matching,
    MatchingDelta,
    WeightedEdge,
    as_weight,
    edge_key,
)
from .oracle import OracleBudget, approx_mwm_static, bipartition
from .solver import DynamicMatcher, OracleSolver


def _int_weight(w: Fraction, W: int) -> int:
    if w.denominator != 1 or not 1 <= w <= W:
        raise GraphError(f"unfolding needs integer weights in [1, {W}], got {w}")
    return int(w)


def copy_id(u: int, i: int, W: int) -> int:
    """Vertex id of copy ``u^i`` (``i`` is 1-based)."""
    return u * W + i - 1


def base_of(x: int, W: int) -> tuple[int, int]:
    """Inverse of :func:`copy_id`: ``(u, i)``."""
    return x // W, x % W + 1


def copy_keys(u: int, v: int, w: int, W: int) -> list[EdgeKey]:
    """The ``w`` unit edges standing for base edge ``uv`` (``u < v``)."""
    return [edge_key(copy_id(u, i, W), copy_id(v, w - i + 1, W)) for i in range(1, w + 1)]


@dataclass
class UnfoldedGraph:
    base: DynamicGraph
    W: int
    graph: DynamicGraph = field(default_factory=DynamicGraph)
    origin: dict[EdgeKey, EdgeKey] = field(default_factory=dict)

    @property
    def n(self) -> int:
        """Vertex count of the unfolding: ``W`` copies per base vertex."""
        return self.W * len(self.base.vertices())

    @property
    def m(self) -> int:
        return len(self.origin)

    def add(self, u: int, v: int, w: Fraction) -> list[EdgeKey]:
        wi = _int_weight(as_weight(w), self.W)
        keys = copy_keys(u, v, wi, self.W)
        for k in keys:
            self.graph.add_edge(k[0], k[1], 1)
            self.origin[k] = edge_key(u, v)
        return keys

    def remove(self, u: int, v: int, w: Fraction) -> list[EdgeKey]:
        keys = copy_keys(u, v, int(w), self.W)
        for k in keys:
            self.graph.remove_edge(*k)
            del self.origin[k]
        return keys


def unfold(g: DynamicGraph, W: Optional[int] = None) -> UnfoldedGraph:
    """Unfold ``g``; ``W`` defaults to its largest weight."""
    if W is None:
        W = max((int(w) for _, w in g.items() if w.denominator == 1), default=1)
    out = UnfoldedGraph(g, W)
    for (u, v), w in g.items():
        out.add(u, v, w)
    return out


def refold(h: Iterable[EdgeKey], unfolded: UnfoldedGraph) -> DynamicGraph:
    """Base edges with at least one unit copy in ``h``, with their weights."""
    out = DynamicGraph()
    for k in h:
        base = unfolded.origin.get(edge_key(*k))
        if base is None:
            raise GraphError(f"{k} is not an edge of the unfolding")
        if base not in out:
            out.add_edge(base[0], base[1], unfolded.base.weight(*base))
    return out


@dataclass
class BdlStats:
    rebuilds: int = 0
    cadence_violations: int = 0
    inner_recourse: int = 0


class BdlSolver(DynamicMatcher):
    """Rebuild-scheduled weighted matching on the refolded inner matching.

    ``inner`` maintains a matching of the unfolded graph; by default it is
    the exact oracle on unit weights, i.e. a maximum cardinality matching.
    """

    name = "bdl"

    def __init__(
        self,
        eps: Fraction,
        W: int,
        inner: Optional[DynamicMatcher] = None,
        budget: Optional[OracleBudget] = None,
    ) -> None:
        super().__init__()
        self.eps = as_weight(eps)
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        self.W = int(W)
        if self.W < 1:
            raise ValueError("W must be a positive integer")
        self.budget = budget
        self.inner = inner if inner is not None else OracleSolver(budget)
        self.unfolded = UnfoldedGraph(self.graph, self.W)
        self.c = 0
        self.w_star = Fraction(0)
        self.stats = BdlStats()

    @property
    def bipartite(self) -> bool:
        return bipartition(self.graph) is not None

    def ratio_floor(self) -> Fraction:
        """``1 - 5 eps`` on bipartite graphs, ``2/3 (1 - 5 eps)`` otherwise."""
        base = 1 - 5 * self.eps
        return base if self.bipartite else Fraction(2, 3) * base

    def _rebuild(self) -> MatchingDelta:
        folded = refold(self.inner.matching.keys(), self.unfolded)
        new = approx_mwm_static(folded, min(self.eps, Fraction(1, 6)), self.budget)
        self.c = 0
        self.w_star = new.total
        self.stats.rebuilds += 1
        return self._replace(new)

    def _step(self, key: EdgeKey, deleted: bool) -> MatchingDelta:
        self.c += 1
        if self.c < self.eps * self.w_star / self.W:
            if deleted and key in self.matching:
                return self._replace(Matching((k, w) for k, w in self.matching.items() if k != key))
            return MatchingDelta()
        return self._rebuild()

    def check_cadence(self) -> None:
        if self.c and not self.c < self.eps * self.w_star / self.W:
            self.stats.cadence_violations += 1
            raise AssertionError(f"{self.c} updates since the last rebuild exceed eps W*/W")

    def initialize(self, edges: Iterable[WeightedEdge]) -> MatchingDelta:
        unit: list[WeightedEdge] = []
        for e in edges:
            self.graph.add_edge(e.u, e.v, e.w)
            unit.extend(WeightedEdge(a, b, 1) for a, b in self.unfolded.add(e.u, e.v, e.w))
        self.stats.inner_recourse += len(self.inner.initialize(unit))
        return self._rebuild()

    def _insert(self, u: int, v: int, w: Fraction) -> MatchingDelta:
        _int_weight(w, self.W)
        self.graph.add_edge(u, v, w)
        for a, b in self.unfolded.add(u, v, w):
            self.stats.inner_recourse += len(self.inner.insert(a, b, 1))
        return self._step((u, v), deleted=False)

    def _delete(self, u: int, v: int) -> MatchingDelta:
        w = self.graph.remove_edge(u, v)
        for a, b in self.unfolded.remove(u, v, w):
            self.stats.inner_recourse += len(self.inner.delete(a, b))
        return self._step((u, v), deleted=True)
