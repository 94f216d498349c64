"""Low-recourse wrapper: phases, checkpoints and transformation trees.

The wrapped solver exposes the inner solver's matching only at checkpoints.
Between checkpoints the output is the last checkpoint matching with deleted
edges dropped.  At a checkpoint the new output is derived from the output of
the checkpoint's tree parent by the direct two-point transformation, which
only moves alternating components that contain an updated edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .graph import (
    DynamicGraph,
    EdgeKey,
    Matching,
    MatchingDelta,
    MatchingError,
    WeightedEdge,
    as_weight,
)
from .oracle import components, walk_order
from .solver import DynamicMatcher, MatcherFactory

_FLOOR_BUCKET = -(10**9)


def dyadic_bucket(w: Fraction) -> int:
    """``floor(log2 w)``; an empty matching sits below every other bucket."""
    if w <= 0:
        return _FLOOR_BUCKET
    j = w.numerator.bit_length() - w.denominator.bit_length()
    while Fraction(2) ** j > w:
        j -= 1
    while Fraction(2) ** (j + 1) <= w:
        j += 1
    return j


def tree_depth_cap(W: Fraction, eps: Fraction) -> int:
    """``theta = ceil(log2(W / (1 - eps)**2))``, at least one."""
    target = as_weight(W) / (1 - as_weight(eps)) ** 2
    k = 0
    while 2**k < target:
        k += 1
    return max(1, k)


def lr_direct_transform(
    prev: Matching,
    current: Matching,
    updated: Iterable[EdgeKey],
    eps: Fraction,
) -> Matching:
    """Move from ``prev`` towards ``current`` only where updates happened.

    ``prev`` must already exclude edges absent from the current graph that
    are not in ``updated``; in practice every vanished edge is an update.
    """
    eps = as_weight(eps)
    upd = set(updated)
    reach = math.ceil(2 / eps)
    x = DynamicGraph()
    for key in prev.keys() ^ current.keys():
        x.add_edge(key[0], key[1], current.weight_of(key) if key in current else prev.weight_of(key))
    drop: set[EdgeKey] = set()
    walks = [(walk_order(c), c.is_cycle) for c in components(x)]
    for walk, cycle in walks:
        n = len(walk)
        for pos, (key, _) in enumerate(walk):
            if key not in upd:
                continue
            for step in (1, -1):
                window = []
                i = pos
                for _ in range(reach):
                    i += step
                    if cycle:
                        i %= n
                        if i == pos:
                            break
                    elif not 0 <= i < n:
                        break
                    window.append(walk[i])
                if len(window) < reach or any(k in upd for k, _ in window):
                    continue
                cands = [(w, k) for k, w in window if k in current]
                if cands:
                    drop.add(min(cands)[1])
    out = Matching((k, w) for k, w in current.items() if k in prev)
    for walk, cycle in walks:
        rest = DynamicGraph()
        for k, w in walk:
            if k not in drop:
                rest.add_edge(k[0], k[1], w)
        for comp in components(rest):
            keys = [k for k, _ in comp.edges]
            source = current if any(k in upd for k in keys) else prev
            for k in keys:
                if k in source:
                    out.add(k[0], k[1], source.weight_of(k))
    return out


@dataclass
class TreeNode:
    time: int
    bucket: int
    matching: Matching
    father: Optional["TreeNode"] = None
    depth: int = 0
    complete: bool = False
    children: list["TreeNode"] = field(default_factory=list)


class TransformationForest:
    """Online placement of checkpoints into transformation trees within one phase."""

    def __init__(self, theta: int) -> None:
        self.theta = theta
        self.roots: list[TreeNode] = []
        self.cur: Optional[TreeNode] = None
        self.root: Optional[TreeNode] = None

    def place(self, node: TreeNode) -> Optional[TreeNode]:
        """Attach ``node``; return its father, or ``None`` when it opens a new tree."""
        cur = self.cur
        if cur is None:
            self._new_root(node)
            return None
        while cur.bucket > node.bucket and cur is not self.root:
            cur = cur.father  # type: ignore[assignment]
        if cur.bucket > node.bucket:
            self._new_root(node)
            father = None
        else:
            node.father = cur
            node.depth = cur.depth + 1
            cur.children.append(node)
            father = cur
        if node.depth == self.theta:
            c: Optional[TreeNode] = cur
            while c is not None and c.complete:
                c = c.father
            if c is None:
                # every ancestor is complete: the next checkpoint starts afresh
                self.cur = None
            else:
                c.complete = True
                self.cur = c
        else:
            self.cur = node
            node.complete = False
        return father

    def _new_root(self, node: TreeNode) -> None:
        node.depth = 0
        node.father = None
        self.root = node
        self.roots.append(node)
        self.cur = node

    def depth(self) -> int:
        best = 0
        stack = list(self.roots)
        while stack:
            n = stack.pop()
            best = max(best, n.depth)
            stack.extend(n.children)
        return best

    def degree(self) -> int:
        best = 0
        stack = list(self.roots)
        while stack:
            n = stack.pop()
            best = max(best, len(n.children))
            stack.extend(n.children)
        return best


@dataclass
class LowRecourseStats:
    phases: int = 0
    checkpoints: int = 0
    roots: int = 0
    transforms: int = 0
    max_depth: int = 0
    max_degree: int = 0
    max_cover: int = 0
    spacing_violations: int = 0
    max_checkpoints_per_phase: int = 0
    checkpoint_cap_violations: int = 0


class LowRecourseSolver(DynamicMatcher):
    """Wrap ``factory(eps, W)`` so that output changes happen at checkpoints only."""

    def __init__(self, eps: Fraction, W: Fraction, factory: MatcherFactory) -> None:
        super().__init__()
        self.eps = as_weight(eps)
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        self.W = as_weight(W)
        self.inner = factory(self.eps, self.W)
        self.shadow = factory(self.eps, Fraction(1))
        self.name = f"lr({self.inner.name})"
        self.theta = tree_depth_cap(self.W, self.eps)
        self.t = 0
        self.stats = LowRecourseStats()
        self._log: list[EdgeKey] = []  # key updated at time t+1 sits at index t
        self._next = 0
        self._phase_end = 0
        self._phase_nu = 0
        self._phase_cps = 0
        self._cover: dict[int, int] = {}
        self.forest = TransformationForest(self.theta)

    # checkpoint machinery ---------------------------------------------------

    def _spacing(self, w: Fraction) -> int:
        return max(1, math.floor(self.eps * w / self.W))

    def _open_phase(self) -> Matching:
        self.stats.phases += 1
        self._phase_nu = len(self.shadow.matching)
        self._phase_end = self.t + max(1, math.floor(self.eps * self._phase_nu))
        self._phase_cps = 0
        self._cover = {}
        self.forest = TransformationForest(self.theta)
        return self._checkpoint()

    def _checkpoint(self) -> Matching:
        cur = self.inner.matching.copy()
        w = cur.total
        spacing = self._spacing(w)
        floor_gap = max(1, math.floor(self.eps * (1 - self.eps) ** 2 * self._phase_nu / self.W))
        if spacing < floor_gap:
            self.stats.spacing_violations += 1
        self.stats.checkpoints += 1
        self._phase_cps += 1
        self.stats.max_checkpoints_per_phase = max(self.stats.max_checkpoints_per_phase, self._phase_cps)
        if self._phase_cps > max(1, math.floor(self.W / (1 - self.eps) ** 2)) + 1:
            self.stats.checkpoint_cap_violations += 1
        node = TreeNode(self.t, dyadic_bucket(w), cur)
        father = self.forest.place(node)
        if father is None:
            self.stats.roots += 1
            node.matching = cur
        else:
            self.stats.transforms += 1
            node.matching = lr_direct_transform(father.matching, cur, self._log[father.time : self.t], self.eps)
            for s in range(father.time + 1, self.t + 1):
                c = self._cover.get(s, 0) + 1
                self._cover[s] = c
                self.stats.max_cover = max(self.stats.max_cover, c)
        if not node.matching.is_valid_in(self.graph):
            raise MatchingError("checkpoint matching is not a matching of the current graph")
        self.stats.max_depth = max(self.stats.max_depth, node.depth)
        self.stats.max_degree = max(self.stats.max_degree, self.forest.degree())
        self._next = min(self.t + spacing, self._phase_end)
        return node.matching.copy()

    def _advance(self, key: EdgeKey, deleted: bool) -> MatchingDelta:
        self.t += 1
        self._log.append(key)
        if self.t >= self._phase_end:
            return self._replace(self._open_phase())
        if self.t >= self._next:
            return self._replace(self._checkpoint())
        if deleted and key in self.matching:
            return self._replace(self._without(key))
        return MatchingDelta()

    def _without(self, key: EdgeKey) -> Matching:
        m = self.matching.copy()
        m.remove(*key)
        return m

    # DynamicMatcher hooks ---------------------------------------------------

    def initialize(self, edges: Iterable[WeightedEdge]) -> MatchingDelta:
        edges = list(edges)
        for e in edges:
            self.graph.add_edge(e.u, e.v, e.w)
        self.inner.initialize(edges)
        self.shadow.initialize(WeightedEdge(e.u, e.v, 1) for e in edges)
        return self._replace(self._open_phase())

    def _insert(self, u: int, v: int, w: Fraction) -> MatchingDelta:
        self.graph.add_edge(u, v, w)
        self.inner.insert(u, v, w)
        self.shadow.insert(u, v, 1)
        return self._advance((u, v), deleted=False)

    def _delete(self, u: int, v: int) -> MatchingDelta:
        self.graph.remove_edge(u, v)
        self.inner.delete(u, v)
        self.shadow.delete(u, v)
        return self._advance((u, v), deleted=True)


def lr_wrap(factory: MatcherFactory) -> MatcherFactory:
    """Factory of low-recourse wrappers around ``factory``."""

    def make(eps: Fraction, W: Fraction) -> DynamicMatcher:
        return LowRecourseSolver(eps, W, factory)

    return make


def lr_build_trees(buckets: Iterable[int], theta: int) -> TransformationForest:
    """Run the online tree construction on a bare stream of dyadic buckets."""
    forest = TransformationForest(theta)
    for t, b in enumerate(buckets):
        forest.place(TreeNode(t, b, Matching()))
    return forest

