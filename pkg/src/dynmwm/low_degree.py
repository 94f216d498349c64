"""Dynamic approximate MWM on graphs of bounded maximum degree.

``LowDegreeBase`` is the per-class base solver: after each update it
re-solves exactly the ball of radius ``ceil(2 W / eps)`` around the touched
endpoints, keeping every matched edge that leaves the ball.
``LowDegreeSolver`` runs those base solvers behind the low-recourse wrapper
inside a depth-3 framework tree and enforces the degree cap.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional

from .framework import FrameworkSolver
from .graph import GraphError, Matching, MatchingDelta, WeightedEdge, as_weight
from .low_recourse import lr_wrap
from .oracle import OracleBudget, mwm_any
from .solver import DynamicMatcher, MatcherFactory

RADIUS_FACTOR = 2
TREE_DEPTH = 3


class LowDegreeBase(DynamicMatcher):
    """Bounded-radius exact rebuild for weights in ``[1, W]``."""

    name = "ld-base"

    def __init__(self, eps: Fraction, W: Fraction, cap: Optional[int] = None, budget: Optional[OracleBudget] = None) -> None:
        super().__init__()
        self.eps = as_weight(eps)
        self.W = as_weight(W)
        self.cap = cap
        self.budget = budget
        self.radius = math.ceil(RADIUS_FACTOR * self.W / self.eps)

    def _ball(self, seeds: Iterable[int]) -> set[int]:
        dist = {s: 0 for s in seeds}
        frontier = list(dist)
        for r in range(self.radius):
            nxt = []
            for x in frontier:
                for y in self.graph.neighbors(x):
                    if y not in dist:
                        dist[y] = r + 1
                        nxt.append(y)
            if not nxt:
                break
            frontier = nxt
        return set(dist)

    def _rebuild(self, seeds: tuple[int, int]) -> MatchingDelta:
        ball = self._ball(seeds)
        # vertices matched across the boundary keep their partner
        pinned = {x for x in ball if (y := self.matching.mate(x)) is not None and y not in ball}
        free = ball - pinned
        sub = self.graph.subgraph(k for k, _ in self.graph.items() if k[0] in free and k[1] in free)
        local = mwm_any(sub, self.budget)
        new = Matching((k, w) for k, w in self.matching.items() if k[0] not in free and k[1] not in free)
        for k, w in local.items():
            new.add(k[0], k[1], w)
        return self._replace(new)

    def _check_cap(self, u: int, v: int) -> None:
        if self.cap is not None and (self.graph.degree(u) >= self.cap or self.graph.degree(v) >= self.cap):
            raise GraphError(f"inserting {(u, v)} would exceed degree {self.cap}")

    def initialize(self, edges: Iterable[WeightedEdge]) -> MatchingDelta:
        for e in edges:
            self._check_cap(e.u, e.v)
            self.graph.add_edge(e.u, e.v, e.w)
        return self._replace(mwm_any(self.graph, self.budget))

    def _insert(self, u: int, v: int, w: Fraction) -> MatchingDelta:
        self._check_cap(u, v)
        self.graph.add_edge(u, v, w)
        return self._rebuild((u, v))

    def _delete(self, u: int, v: int) -> MatchingDelta:
        self.graph.remove_edge(u, v)
        return self._rebuild((u, v))


def ld_base_factory(cap: Optional[int] = None, budget: Optional[OracleBudget] = None) -> MatcherFactory:
    def make(eps: Fraction, W: Fraction) -> DynamicMatcher:
        return LowDegreeBase(eps, W, cap, budget)

    return make


class LowDegreeSolver(FrameworkSolver):
    """Depth-3 framework tree over low-recourse-wrapped base solvers, with a degree cap."""

    def __init__(
        self,
        eps: Fraction,
        W: Fraction,
        cap: int,
        w_min: Fraction = Fraction(1),
        budget: Optional[OracleBudget] = None,
    ) -> None:
        super().__init__(eps, W, lr_wrap(ld_base_factory(None, budget)), mode="tree", depth=TREE_DEPTH, w_min=w_min)
        self.cap = cap
        self.name = f"low-degree(cap={cap})"

    def _guard(self, u: int, v: int) -> None:
        if self.graph.degree(u) >= self.cap or self.graph.degree(v) >= self.cap:
            raise GraphError(f"inserting {(u, v)} would exceed degree {self.cap}")

    def initialize(self, edges: Iterable[WeightedEdge]) -> MatchingDelta:
        edges = list(edges)
        deg: dict[int, int] = {}
        for e in edges:
            for x in (e.u, e.v):
                deg[x] = deg.get(x, 0) + 1
                if deg[x] > self.cap:
                    raise GraphError(f"vertex {x} exceeds degree {self.cap}")
        return super().initialize(edges)

    def _insert(self, u: int, v: int, w: Fraction) -> MatchingDelta:
        self._guard(u, v)
        return super()._insert(u, v, w)
