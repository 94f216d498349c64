"""Fully dynamic approximate MWM on graphs of maximum degree two.

The store keeps the logical graph minus a reservoir ``R`` of cut edges, so
that every stored path or cycle is short.  The output is the union of exact
path/cycle DP matchings of the stored components; only components touched
by an update are re-solved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
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
from .oracle import mwm_path_cycle
from .solver import DynamicMatcher


@dataclass
class PathOrCycle:
    """A stored component: vertices and edges in walk order."""

    vertices: list[int]
    edges: list[tuple[EdgeKey, Fraction]]
    cycle: bool

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def heads(self) -> tuple[int, int]:
        if self.cycle:
            raise ValueError("a cycle has no heads")
        return self.vertices[0], self.vertices[-1]


class PathCycleStore:
    """Degree-two edge store with linear-time component queries."""

    def __init__(self) -> None:
        self.g = DynamicGraph()

    def link(self, u: int, v: int, w: Fraction) -> None:
        if self.g.degree(u) >= 2 or self.g.degree(v) >= 2:
            raise GraphError(f"linking {(u, v)} would exceed degree two")
        self.g.add_edge(u, v, w)

    def cut(self, u: int, v: int) -> Fraction:
        return self.g.remove_edge(u, v)

    def __contains__(self, key: EdgeKey) -> bool:
        return key in self.g

    def component(self, x: int) -> PathOrCycle:
        """The path or cycle through ``x``, walked from its smaller-id head.

        Cycles start at their smallest vertex towards its smaller neighbour.
        """
        seen = {x}
        stack = [x]
        while stack:
            y = stack.pop()
            for z in self.g.neighbors(y):
                if z not in seen:
                    seen.add(z)
                    stack.append(z)
        ends = [y for y in seen if self.g.degree(y) <= 1]
        cycle = not ends
        start = min(ends) if ends else min(seen)
        verts = [start]
        edges: list[tuple[EdgeKey, Fraction]] = []
        prev: Optional[int] = None
        cur = start
        while True:
            nxt = sorted(z for z in self.g.neighbors(cur) if z != prev)
            if not nxt or (cycle and len(edges) == len(seen)):
                break
            z = nxt[0]
            edges.append((edge_key(cur, z), self.g.weight(cur, z)))
            if z == start:
                break
            verts.append(z)
            prev, cur = cur, z
        return PathOrCycle(verts, edges, cycle)

    @staticmethod
    def find_min(p: PathOrCycle, head: int, lo: int, hi: int) -> EdgeKey:
        """Minimum-weight edge among positions ``lo..hi`` (1-indexed) counted from ``head``.

        Ties go to the edge nearest ``head``, then to the smaller key.
        """
        if p.cycle:
            raise ValueError("find_min needs a path")
        if not 1 <= lo <= hi <= len(p):
            raise ValueError(f"window {lo}..{hi} out of range for length {len(p)}")
        edges = p.edges if head == p.vertices[0] else p.edges[::-1]
        if head not in p.heads:
            raise ValueError(f"{head} is not a head")
        best = min(range(lo - 1, hi), key=lambda i: (edges[i][1], i, edges[i][0]))
        return edges[best][0]

    def mwm(self, p: PathOrCycle) -> Matching:
        if not p.edges:
            return Matching()
        return mwm_path_cycle(DynamicGraph(edges=(WeightedEdge(k[0], k[1], w) for k, w in p.edges)))


class DegreeTwoSolver(DynamicMatcher):
    """Matching on ``G`` with ``w(M) >= (1 - 2 eps) mu_w(G)`` and short stored components."""

    name = "degree-two"

    def __init__(self, eps: Fraction) -> None:
        super().__init__()
        self.eps = as_weight(eps)
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        self.c = math.ceil(1 / self.eps)
        self.store = PathCycleStore()
        self.reservoir: dict[EdgeKey, Fraction] = {}
        self._touched: set[int] = set()

    @property
    def cap(self) -> int:
        return 3 * self.c

    # store edits that remember which components must be re-solved

    def _link(self, key: EdgeKey, w: Fraction) -> None:
        self.store.link(key[0], key[1], w)
        self._touched.update(key)

    def _cut(self, key: EdgeKey) -> None:
        self.store.cut(*key)
        self._touched.update(key)

    def _maintain(self, x: int) -> None:
        p = self.store.component(x)
        if p.cycle:
            if len(p) <= self.cap:
                return
            # not reachable from valid inputs; break the cycle at its minimum
            key = min(p.edges, key=lambda kw: (kw[1], kw[0]))[0]
            self._cut(key)
            self.reservoir[key] = self.store_weight(key, p)
            self._maintain(key[0])
            self._maintain(key[1])
            return
        if len(p) < self.cap:
            return
        h = p.vertices[0]
        lo = (len(p) - self.c) // 2
        key = self.store.find_min(p, h, lo, lo + self.c - 1)
        self.reservoir[key] = self.store_weight(key, p)
        self._cut(key)
        pos = [k for k, _ in p.edges].index(key)
        left = p.vertices[pos]
        right = p.vertices[pos + 1]
        self._maintain(left)
        self._maintain(right)

    @staticmethod
    def store_weight(key: EdgeKey, p: PathOrCycle) -> Fraction:
        for k, w in p.edges:
            if k == key:
                return w
        raise KeyError(key)

    def _reinstate_at(self, x: int) -> None:
        p = self.store.component(x)
        h = x if not p.edges else (p.vertices[-1] if p.vertices[0] == x else p.vertices[0])
        if p.cycle:
            return
        cands = sorted(edge_key(h, y) for y in self.graph.neighbors(h) if edge_key(h, y) in self.reservoir)
        if not cands:
            return
        key = cands[0]
        w = self.reservoir.pop(key)
        self._link(key, w)
        self._maintain(h)

    def _flush(self) -> MatchingDelta:
        touched, self._touched = self._touched, set()
        comps: dict[int, PathOrCycle] = {}
        covered: set[int] = set()
        for x in sorted(touched):
            if x in covered:
                continue
            p = self.store.component(x)
            covered.update(p.vertices)
            comps[x] = p
        new = Matching((k, w) for k, w in self.matching.items() if k[0] not in covered and k[1] not in covered)
        for p in comps.values():
            for k, w in self.store.mwm(p).items():
                new.add(k[0], k[1], w)
        return self._replace(new)

    def _insert(self, u: int, v: int, w: Fraction) -> MatchingDelta:
        if self.graph.degree(u) >= 2 or self.graph.degree(v) >= 2:
            raise GraphError(f"inserting {(u, v)} would exceed degree two")
        self.graph.add_edge(u, v, w)
        self._link((u, v), w)
        if not self.store.component(u).cycle:
            self._maintain(u)
        return self._flush()

    def _delete(self, u: int, v: int) -> MatchingDelta:
        key = (u, v)
        self.graph.remove_edge(u, v)
        if key in self.reservoir:
            del self.reservoir[key]
            return MatchingDelta()
        self._cut(key)
        self._reinstate_at(u)
        self._reinstate_at(v)
        return self._flush()

    def initialize(self, edges: Iterable[WeightedEdge]) -> MatchingDelta:
        out = MatchingDelta()
        for e in edges:
            out.extend(self.insert(e.u, e.v, e.w))
        return out

    # audits -----------------------------------------------------------------

    def reservoir_weight(self) -> Fraction:
        return sum(self.reservoir.values(), Fraction(0))

    def max_component_length(self) -> int:
        best = 0
        seen: set[int] = set()
        for x in self.store.g.vertices():
            if x in seen or not self.store.g.degree(x):
                continue
            p = self.store.component(x)
            seen.update(p.vertices)
            best = max(best, len(p))
        return best

    def check_invariants(self) -> None:
        assert self.max_component_length() <= self.cap, "stored component too long"
        stored = set(self.store.g.keys())
        assert stored.isdisjoint(self.reservoir), "edge both stored and reserved"
        assert stored | set(self.reservoir) == set(self.graph.keys()), "store and reservoir do not cover G"
        assert self.matching.is_valid_in(self.store.g)
