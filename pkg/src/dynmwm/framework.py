"""Weight-reduction framework: padded classes, census aggregation, degree-two merge.

Weights are grouped by ``floor(log_{1/eps}(w / w_min))``.  Class ``i``
covers groups ``3i-3 .. min(L, 3i-1)`` and is padded by one group on each
side, so each edge lands in at most two classes.  Every class runs an
inner solver (optionally refined into a binary tree of half-width leaves
merged by degree-two solvers).  Odd and even classes are aggregated by two
census instances whose outputs are merged by a degree-two solver.

The ``ultimate`` mode uses dyadic classes instead, grouped into ``g``
residue groups, each aggregated by a census and merged by the low-degree
solver.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .census import CensusMatcher
from .degree_two import DegreeTwoSolver
from .graph import (
    EdgeKey,
    GraphError,
    Matching,
    MatchingDelta,
    WeightedEdge,
    WeightInterval,
    _check_eps,
    apply_delta,
    as_weight,
    floor_log,
    pow_ge,
)
from .solver import DynamicMatcher, MatcherFactory, ScaledMatcher

# Composition with delta = eps**-3 has g = 2 phases, each losing 7 eps; the
# census loses 4 eps and the degree-two merge 2 eps.
COMPOSE_PHASES = 2
FRAMEWORK_CONSTANT = 7 * COMPOSE_PHASES + 4 + 2

MODES = ("standard", "tree", "ultimate", "census-only")


def tree_constant(depth: int, base: int = FRAMEWORK_CONSTANT) -> int:
    """Loss constant after ``depth`` halvings, each costing a factor ``base + 1``."""
    return base * (base + 1) ** depth


def ultimate_constant(eps: Fraction) -> Fraction:
    """``C'`` in ``1 - C' eps log2(1/eps)``: seven per residue phase plus census and merge."""
    g = ultimate_groups(eps)
    return Fraction(7 * g + 4 + 2) / Fraction(max(1, math.ceil(math.log2(1 / eps))))


def ultimate_groups(eps: Fraction) -> int:
    """``ceil(log2(eps**-3)) + 1`` residue groups for dyadic classes."""
    target = 1 / as_weight(eps) ** 3
    k = 0
    while 2**k < target:
        k += 1
    return k + 1


class _Union:
    """Reference-counted union of several matchings feeding one merger."""

    def __init__(self, merger: DynamicMatcher) -> None:
        self.merger = merger
        self.count: Counter[EdgeKey] = Counter()
        self.weight: dict[EdgeKey, Fraction] = {}

    def initialize(self, parts: Iterable[Iterable[tuple[EdgeKey, Fraction]]]) -> MatchingDelta:
        for part in parts:
            for key, w in part:
                self.count[key] += 1
                self.weight[key] = w
        return self.merger.initialize(WeightedEdge(k[0], k[1], self.weight[k]) for k in sorted(self.count))

    def apply(self, deltas: Iterable[MatchingDelta]) -> MatchingDelta:
        before = {k for k, c in self.count.items() if c > 0}
        for d in deltas:
            for key in d.removed:
                self.count[key] -= 1
            for key, w in d.added:
                self.count[key] += 1
                self.weight[key] = w
        after = {k for k, c in self.count.items() if c > 0}
        out = MatchingDelta()
        for key in sorted(before - after):
            out.extend(self.merger.delete(*key))
            del self.count[key]
            del self.weight[key]
        for key in sorted(after - before):
            out.extend(self.merger.insert(key[0], key[1], self.weight[key]))
        return out


class ClassNode:
    """A weight class ``[b**x, b**y)`` (relative to ``w_min``) solved by a leaf or a merged pair."""

    def __init__(
        self,
        x: Fraction,
        y: Fraction,
        eps: Fraction,
        base: Fraction,
        factory: MatcherFactory,
        depth: int,
        w_min: Fraction,
        stats: "FrameworkStats",
    ) -> None:
        self.x, self.y = Fraction(x), Fraction(y)
        self.base = base
        self.w_min = w_min
        self.stats = stats
        self.children: list[ClassNode] = []
        if depth > 0:
            m = (self.x + self.y) / 2
            self.children = [
                ClassNode(self.x, m + 1, eps, base, factory, depth - 1, w_min, stats),
                ClassNode(m - 1, self.y, eps, base, factory, depth - 1, w_min, stats),
            ]
            self.solver: DynamicMatcher = DegreeTwoSolver(eps)
            self.union: Optional[_Union] = _Union(self.solver)
        else:
            lo = max(0, math.floor(self.x))
            unit = base**lo
            width = base ** (math.ceil(self.y) - lo)
            self.solver = ScaledMatcher(factory(eps, width), unit * w_min)
            self.union = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def contains(self, w: Fraction) -> bool:
        rel = w / self.w_min
        return pow_ge(rel, self.base, self.x) and not pow_ge(rel, self.base, self.y)

    def interval(self) -> WeightInterval:
        """Real interval; only exact when both exponents are integers."""
        lo = self.w_min * self.base ** math.floor(self.x)
        hi = self.w_min * self.base ** math.ceil(self.y)
        return WeightInterval(lo, hi)

    @property
    def matching(self):
        return self.solver.matching

    def leaves(self) -> list["ClassNode"]:
        if self.is_leaf:
            return [self]
        return [leaf for c in self.children for leaf in c.leaves()]

    def initialize(self, edges: list[WeightedEdge]) -> MatchingDelta:
        mine = [e for e in edges if self.contains(e.w)]
        if self.is_leaf:
            return self.solver.initialize(mine)
        for c in self.children:
            c.initialize(mine)
        assert self.union is not None
        return self.union.initialize(c.matching.items() for c in self.children)

    def insert(self, u: int, v: int, w: Fraction) -> MatchingDelta:
        if self.is_leaf:
            return self.solver.insert(u, v, w)
        assert self.union is not None
        return self.union.apply([c.insert(u, v, w) for c in self.children if c.contains(w)])

    def delete(self, u: int, v: int, w: Fraction) -> MatchingDelta:
        if self.is_leaf:
            self.stats.leaf_deletes += 1
            return self.solver.delete(u, v)
        assert self.union is not None
        return self.union.apply([c.delete(u, v, w) for c in self.children if c.contains(w)])


@dataclass
class FrameworkStats:
    leaf_deletes: int = 0
    census_changes: int = 0
    merger_changes: int = 0


class _CensusGroup:
    """A census over a spread subset of classes; translates class deltas to census ops."""

    def __init__(self, members: list[int], intervals: list[WeightInterval], eps: Fraction) -> None:
        self.members = members
        self.index = {c: j + 1 for j, c in enumerate(members)}
        self.census = CensusMatcher(intervals, eps)

    def initialize(self, matchings: list[list[tuple[EdgeKey, Fraction]]]) -> MatchingDelta:
        return self.census.initialize(matchings)

    def apply(self, cls: int, delta: MatchingDelta) -> MatchingDelta:
        j = self.index[cls]
        out = MatchingDelta()
        for key in delta.removed:
            out.extend(self.census.delete(j, *key))
        for key, w in delta.added:
            out.extend(self.census.insert(j, key[0], key[1], w))
        return out


class FrameworkSolver(DynamicMatcher):
    """The reduction pipeline around an arbitrary inner solver factory."""

    def __init__(
        self,
        eps: Fraction,
        W: Fraction,
        factory: MatcherFactory,
        mode: str = "standard",
        depth: int = 0,
        w_min: Fraction = Fraction(1),
        merger_factory: Optional[Callable[[Fraction, Fraction, int], DynamicMatcher]] = None,
    ) -> None:
        super().__init__()
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if depth < 0:
            raise ValueError("depth must be non-negative")
        self.eps = _check_eps(eps)
        self.W = as_weight(W)
        if self.W < 1:
            raise ValueError("W must be at least 1")
        self.w_min = as_weight(w_min)
        self.mode = mode
        self.depth = depth if mode == "tree" else 0
        self.name = f"framework/{mode}" + (f"(d={self.depth})" if mode == "tree" else "")
        self.stats = FrameworkStats()
        self.base = 1 / self.eps
        self.roots: list[ClassNode] = []
        self.groups: list[_CensusGroup] = []
        self._group_of: dict[int, _CensusGroup] = {}
        if mode == "ultimate":
            self._build_ultimate(factory, merger_factory)
        else:
            self._build_standard(factory)

    # construction -----------------------------------------------------------

    def _build_standard(self, factory: MatcherFactory) -> None:
        self.L = floor_log(self.W, self.base)
        count = -(-(self.L + 1) // 3)
        for i in range(1, count + 1):
            lo, hi = 3 * i - 3, min(self.L, 3 * i - 1)
            node = ClassNode(Fraction(lo - 1), Fraction(hi + 2), self.eps, self.base, factory, self.depth, self.w_min, self.stats)
            self.roots.append(node)
        for parity in (1, 0):
            members = [c for c in range(len(self.roots)) if (c + 1) % 2 == parity]
            if not members:
                continue
            ivs = [self._padded(c) for c in members]
            grp = _CensusGroup(members, ivs, self.eps)
            self.groups.append(grp)
            for c in members:
                self._group_of[c] = grp
        self.merger: Optional[DynamicMatcher] = DegreeTwoSolver(self.eps) if self.mode != "census-only" else None
        self.union = _Union(self.merger) if self.merger is not None else None

    def _padded(self, c: int) -> WeightInterval:
        node = self.roots[c]
        return WeightInterval(self.w_min * self.base**node.x, self.w_min * self.base**node.y)

    def _build_ultimate(self, factory: MatcherFactory, merger_factory) -> None:
        two = Fraction(2)
        top = floor_log(self.W, two)
        self.L = top
        self.g = ultimate_groups(self.eps)
        self.class_intervals: list[WeightInterval] = []
        for i in range(top + 1):
            pad = WeightInterval(self.w_min * self.eps * two**i, self.w_min * two ** (i + 1) / self.eps)
            self.class_intervals.append(pad)
            self.roots.append(_DyadicClass(pad, self.eps, factory, self.stats))
        for j in range(self.g):
            members = [i for i in range(top + 1) if i % self.g == j]
            if not members:
                continue
            grp = _CensusGroup(members, [self.class_intervals[i] for i in members], self.eps)
            self.groups.append(grp)
            for i in members:
                self._group_of[i] = grp
        if merger_factory is None:
            from .low_degree import LowDegreeSolver

            def merger_factory(eps: Fraction, W: Fraction, cap: int) -> DynamicMatcher:
                return LowDegreeSolver(eps, W, cap, w_min=self.w_min * eps)

        span = self.W / (self.eps * self.eps)
        self.merger = merger_factory(self.eps, span, max(2, len(self.groups)))
        self.union = _Union(self.merger)

    # helpers ----------------------------------------------------------------

    def _check_weight(self, w: Fraction) -> None:
        if not (self.w_min <= w <= self.w_min * self.W):
            raise GraphError(f"weight {w} outside [{self.w_min}, {self.w_min * self.W}]")

    def classes_of(self, w: Fraction) -> list[int]:
        return [c for c, node in enumerate(self.roots) if node.contains(w)]

    def _census_states(self):
        return [g.census for g in self.groups]

    def _finish(self, census_deltas: list[MatchingDelta]) -> MatchingDelta:
        self.stats.census_changes += sum(len(d) for d in census_deltas)
        if self.union is None:
            best = max(self._census_states(), key=lambda c: (c.matching.total, -len(c.matching)), default=None)
            return self._replace(best.matching.copy() if best is not None else Matching())
        d = self.union.apply(census_deltas)
        self.stats.merger_changes += len(d)
        apply_delta(self.matching, d)
        return d

    # DynamicMatcher hooks ---------------------------------------------------

    def initialize(self, edges: Iterable[WeightedEdge]) -> MatchingDelta:
        edges = list(edges)
        for e in edges:
            self._check_weight(e.w)
            self.graph.add_edge(e.u, e.v, e.w)
        for node in self.roots:
            node.initialize(edges)
        for grp in self.groups:
            grp.initialize([self.roots[c].matching.items() for c in grp.members])
        if self.union is None:
            return self._finish([])
        d = self.union.initialize(g.census.matching.items() for g in self.groups)
        apply_delta(self.matching, d)
        return d

    def _route(self, op: str, u: int, v: int, w: Fraction) -> MatchingDelta:
        census_deltas = []
        for c in self.classes_of(w):
            node = self.roots[c]
            d = node.insert(u, v, w) if op == "insert" else node.delete(u, v, w)
            census_deltas.append(self._group_of[c].apply(c, d))
        return self._finish(census_deltas)

    def _insert(self, u: int, v: int, w: Fraction) -> MatchingDelta:
        self._check_weight(w)
        self.graph.add_edge(u, v, w)
        return self._route("insert", u, v, w)

    def _delete(self, u: int, v: int) -> MatchingDelta:
        w = self.graph.remove_edge(u, v)
        return self._route("delete", u, v, w)

    # audits -----------------------------------------------------------------

    def check_routing(self) -> None:
        """Every edge sits in exactly the leaves whose intervals contain its weight."""
        for node in self.roots:
            for leaf in node.leaves() if isinstance(node, ClassNode) else [node]:
                expect = {k for k, w in self.graph.items() if node.contains(w) and leaf.contains(w)}
                got = set(leaf.solver.graph.keys())
                assert expect == got, f"routing mismatch in a leaf of class {node}"

    def class_multiplicity(self) -> int:
        """Largest number of root classes sharing one edge."""
        return max((len(self.classes_of(w)) for _, w in self.graph.items()), default=0)

    def leaf_count(self) -> int:
        return sum(len(n.leaves()) if isinstance(n, ClassNode) else 1 for n in self.roots)


class _DyadicClass:
    """Padded dyadic class of the ultimate mode, backed by one scaled inner solver."""

    def __init__(self, pad: WeightInterval, eps: Fraction, factory: MatcherFactory, stats: FrameworkStats) -> None:
        self.pad = pad
        self.stats = stats
        self.solver = ScaledMatcher(factory(eps, pad.width), pad.lo)

    def contains(self, w: Fraction) -> bool:
        return w in self.pad

    @property
    def matching(self):
        return self.solver.matching

    def leaves(self) -> list["_DyadicClass"]:
        return [self]

    def initialize(self, edges: list[WeightedEdge]) -> MatchingDelta:
        return self.solver.initialize(e for e in edges if self.contains(e.w))

    def insert(self, u: int, v: int, w: Fraction) -> MatchingDelta:
        return self.solver.insert(u, v, w)

    def delete(self, u: int, v: int, w: Fraction) -> MatchingDelta:
        self.stats.leaf_deletes += 1
        return self.solver.delete(u, v)


def compose_ratio_floor(eps: Fraction, mode: str = "standard", depth: int = 0) -> Fraction:
    """Documented guarantee ``1 - C eps`` (or its tree/ultimate analogue); may be vacuous."""
    eps = as_weight(eps)
    if mode == "tree":
        return 1 - tree_constant(depth) * eps
    if mode == "ultimate":
        return 1 - ultimate_constant(eps) * eps * max(1, math.ceil(math.log2(1 / eps)))
    return 1 - FRAMEWORK_CONSTANT * eps

