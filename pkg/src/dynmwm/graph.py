"""Weighted dynamic graphs, matchings, weight intervals and update events.

Weights are :class:`fractions.Fraction` throughout so that every bound
checked by the test-suite is compared exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Union

EdgeKey = tuple[int, int]
WeightLike = Union[int, str, Fraction, float]


class GraphError(ValueError):
    """Raised on an illegal graph mutation (duplicate insert, missing delete)."""


class MatchingError(ValueError):
    """Raised when an edge set violates the matching property."""


def as_weight(x: WeightLike) -> Fraction:
    """Convert ``x`` to an exact rational weight.

    Floats go through ``repr`` so ``1.5`` becomes ``3/2`` instead of the
    binary expansion of the double.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def edge_key(u: int, v: int) -> EdgeKey:
    if u == v:
        raise GraphError(f"self-loop at vertex {u}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, order=True)
class WeightedEdge:
    u: int
    v: int
    w: Fraction

    def __post_init__(self) -> None:
        if self.u == self.v:
            raise GraphError(f"self-loop at vertex {self.u}")
        if self.u > self.v:
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)
        w = as_weight(self.w)
        if w <= 0:
            raise GraphError(f"non-positive weight {w} on edge ({self.u}, {self.v})")
        object.__setattr__(self, "w", w)

    @property
    def key(self) -> EdgeKey:
        return (self.u, self.v)


class DynamicGraph:
    """Simple undirected graph with positive rational edge weights.

    Vertex ids are natural numbers; the vertex count grows to cover the
    largest id seen and isolated vertices are never dropped.
    """

    def __init__(self, n: int = 0, edges: Iterable[WeightedEdge] = ()) -> None:
        self.n = n
        self._w: dict[EdgeKey, Fraction] = {}
        self._adj: dict[int, dict[int, Fraction]] = {}
        for e in edges:
            self.add_edge(e.u, e.v, e.w)

    @classmethod
    def from_triples(cls, triples: Iterable[tuple[int, int, WeightLike]], n: int = 0) -> "DynamicGraph":
        return cls(n, (WeightedEdge(u, v, as_weight(w)) for u, v, w in triples))

    def add_edge(self, u: int, v: int, w: WeightLike) -> EdgeKey:
        key = edge_key(u, v)
        if key in self._w:
            raise GraphError(f"duplicate insert of edge {key}")
        w = as_weight(w)
        if w <= 0:
            raise GraphError(f"non-positive weight {w} on edge {key}")
        self._w[key] = w
        self._adj.setdefault(u, {})[v] = w
        self._adj.setdefault(v, {})[u] = w
        self.n = max(self.n, key[1] + 1)
        return key

    def remove_edge(self, u: int, v: int) -> Fraction:
        key = edge_key(u, v)
        try:
            w = self._w.pop(key)
        except KeyError:
            raise GraphError(f"delete of missing edge {key}") from None
        del self._adj[u][v]
        del self._adj[v][u]
        return w

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and edge_key(u, v) in self._w

    def weight(self, u: int, v: int) -> Fraction:
        return self._w[edge_key(u, v)]

    def neighbors(self, u: int) -> dict[int, Fraction]:
        return self._adj.get(u, {})

    def degree(self, u: int) -> int:
        return len(self._adj.get(u, ()))

    def max_degree(self) -> int:
        return max((len(a) for a in self._adj.values()), default=0)

    @property
    def m(self) -> int:
        return len(self._w)

    def __len__(self) -> int:
        return len(self._w)

    def __contains__(self, key: EdgeKey) -> bool:
        return key in self._w

    def keys(self) -> list[EdgeKey]:
        return sorted(self._w)

    def edges(self) -> Iterator[WeightedEdge]:
        for key in sorted(self._w):
            yield WeightedEdge(key[0], key[1], self._w[key])

    def items(self) -> Iterator[tuple[EdgeKey, Fraction]]:
        for key in sorted(self._w):
            yield key, self._w[key]

    def weight_map(self) -> dict[EdgeKey, Fraction]:
        return dict(self._w)

    def vertices(self) -> list[int]:
        """Vertices incident to at least one edge, ascending."""
        return sorted(u for u, a in self._adj.items() if a)

    def total_weight(self) -> Fraction:
        return sum(self._w.values(), Fraction(0))

    def aspect_ratio(self) -> Fraction:
        if not self._w:
            return Fraction(1)
        return max(self._w.values()) / min(self._w.values())

    def copy(self) -> "DynamicGraph":
        g = DynamicGraph(self.n)
        for key, w in self._w.items():
            g.add_edge(key[0], key[1], w)
        return g

    def subgraph(self, keys: Iterable[EdgeKey]) -> "DynamicGraph":
        g = DynamicGraph(self.n)
        for key in keys:
            g.add_edge(key[0], key[1], self._w[key])
        return g

    def components(self) -> list[list[int]]:
        """Connected components over non-isolated vertices, each sorted."""
        seen: set[int] = set()
        out = []
        for s in self.vertices():
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            stack = [s]
            while stack:
                x = stack.pop()
                for y in self._adj[x]:
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        stack.append(y)
            out.append(sorted(comp))
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DynamicGraph):
            return NotImplemented
        return self._w == other._w

    def __repr__(self) -> str:
        return f"DynamicGraph(n={self.n}, m={self.m})"


class Matching:
    """A vertex-disjoint edge set with an exactly maintained total weight."""

    __slots__ = ("_w", "_mate", "total")

    def __init__(self, edges: Iterable[tuple[EdgeKey, Fraction]] = ()) -> None:
        self._w: dict[EdgeKey, Fraction] = {}
        self._mate: dict[int, int] = {}
        self.total = Fraction(0)
        for key, w in edges:
            self.add(key[0], key[1], w)

    @classmethod
    def from_keys(cls, g: DynamicGraph, keys: Iterable[EdgeKey]) -> "Matching":
        return cls((k, g.weight(*k)) for k in keys)

    def add(self, u: int, v: int, w: WeightLike) -> None:
        key = edge_key(u, v)
        if u in self._mate or v in self._mate:
            raise MatchingError(f"edge {key} shares a vertex with the matching")
        w = as_weight(w)
        self._w[key] = w
        self._mate[u] = v
        self._mate[v] = u
        self.total += w

    def remove(self, u: int, v: int) -> Fraction:
        key = edge_key(u, v)
        try:
            w = self._w.pop(key)
        except KeyError:
            raise MatchingError(f"edge {key} is not matched") from None
        del self._mate[u]
        del self._mate[v]
        self.total -= w
        return w

    def discard(self, u: int, v: int) -> bool:
        if edge_key(u, v) in self._w:
            self.remove(u, v)
            return True
        return False

    def mate(self, v: int) -> Optional[int]:
        """Vertex-match query."""
        return self._mate.get(v)

    def weight_of(self, key: EdgeKey) -> Fraction:
        return self._w[key]

    def __contains__(self, key: EdgeKey) -> bool:
        return key in self._w

    def __len__(self) -> int:
        return len(self._w)

    def __iter__(self) -> Iterator[EdgeKey]:
        return iter(sorted(self._w))

    def keys(self) -> set[EdgeKey]:
        return set(self._w)

    def items(self) -> list[tuple[EdgeKey, Fraction]]:
        return sorted(self._w.items())

    def copy(self) -> "Matching":
        m = Matching()
        m._w = dict(self._w)
        m._mate = dict(self._mate)
        m.total = self.total
        return m

    def restricted_to(self, g: DynamicGraph) -> "Matching":
        """Edges of this matching that are still present in ``g``."""
        return Matching((k, w) for k, w in self._w.items() if k in g)

    def recompute_total(self) -> Fraction:
        return sum(self._w.values(), Fraction(0))

    def is_valid_in(self, g: DynamicGraph) -> bool:
        seen: set[int] = set()
        for (u, v), w in self._w.items():
            if (u, v) not in g or g.weight(u, v) != w:
                return False
            if u in seen or v in seen:
                return False
            seen.update((u, v))
        return self.total == self.recompute_total()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matching):
            return NotImplemented
        return self._w == other._w

    def __repr__(self) -> str:
        return f"Matching({sorted(self._w)}, total={self.total})"


def symmetric_difference(a: Matching, b: Matching) -> set[EdgeKey]:
    return a.keys() ^ b.keys()


# --- weight intervals -------------------------------------------------------


@dataclass(frozen=True)
class WeightInterval:
    """Half-open interval ``[lo, hi)``; ``closed`` also admits ``hi`` itself."""

    lo: Fraction
    hi: Fraction
    closed: bool = False

    def __post_init__(self) -> None:
        lo, hi = as_weight(self.lo), as_weight(self.hi)
        if not (0 < lo < hi):
            raise ValueError(f"need 0 < lo < hi, got [{lo}, {hi})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __contains__(self, w: object) -> bool:
        w = as_weight(w)  # type: ignore[arg-type]
        return self.lo <= w < self.hi or (self.closed and w == self.hi)

    @property
    def width(self) -> Fraction:
        return self.hi / self.lo

    def padded(self, eps: Fraction) -> "WeightInterval":
        return WeightInterval(self.lo * eps, self.hi / eps, self.closed)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}{']' if self.closed else ')'}"


def _check_eps(eps: Fraction, upper: Fraction = Fraction(1, 6)) -> Fraction:
    eps = as_weight(eps)
    if not (0 < eps <= upper):
        raise ValueError(f"eps must lie in (0, {upper}], got {eps}")
    return eps


def is_spread(intervals: list[WeightInterval], delta: Fraction) -> bool:
    return all(b.lo >= delta * a.hi for a, b in zip(intervals, intervals[1:]))


def is_wide(intervals: list[WeightInterval], delta: Fraction) -> bool:
    return all(iv.hi >= delta * iv.lo for iv in intervals)


@dataclass(frozen=True)
class WeightPartition:
    intervals: tuple[WeightInterval, ...]
    delta: Fraction
    eps: Fraction
    padded: Optional[tuple[WeightInterval, ...]] = None
    is_partition: bool = True

    def __post_init__(self) -> None:
        if self.is_partition:
            for a, b in zip(self.intervals, self.intervals[1:]):
                if a.hi != b.lo:
                    raise ValueError(f"intervals {a} and {b} are not contiguous")
        if not is_wide(list(self.intervals), self.delta):
            raise ValueError(f"partition is not {self.delta}-wide")

    def __len__(self) -> int:
        return len(self.intervals)

    def class_of(self, w: WeightLike) -> Optional[int]:
        """0-based index of the unpadded interval holding ``w``."""
        w = as_weight(w)
        for i, iv in enumerate(self.intervals):
            if w in iv:
                return i
        return None

    def padded_classes_of(self, w: WeightLike) -> list[int]:
        w = as_weight(w)
        pads = self.padded or tuple(iv.padded(self.eps) for iv in self.intervals)
        return [i for i, iv in enumerate(pads) if w in iv]


def build_partition(
    w_min: WeightLike,
    w_max: WeightLike,
    delta: WeightLike,
    eps: WeightLike,
    pad: bool = True,
) -> WeightPartition:
    """Geometric ``delta``-wide partition of ``[w_min, w_max]`` anchored at ``w_min``.

    The grid is ``w_min * delta**i``; when ``w_max`` lands exactly on a grid
    point the last interval is closed on the right instead of adding an
    extra interval.
    """
    w_min, w_max, delta = as_weight(w_min), as_weight(w_max), as_weight(delta)
    eps = _check_eps(as_weight(eps))
    if delta <= 1:
        raise ValueError(f"delta must exceed 1, got {delta}")
    if not (0 < w_min <= w_max):
        raise ValueError(f"need 0 < w_min <= w_max, got {w_min}, {w_max}")
    k = 1
    while w_min * delta**k < w_max:
        k += 1
    closed = w_min * delta**k == w_max and w_max > w_min
    intervals = tuple(
        WeightInterval(w_min * delta**i, w_min * delta ** (i + 1), closed and i == k - 1)
        for i in range(k)
    )
    padded = tuple(iv.padded(eps) for iv in intervals) if pad else None
    return WeightPartition(intervals, delta, eps, padded)


def restrict(g: DynamicGraph, interval: WeightInterval) -> DynamicGraph:
    """Subgraph of ``g`` keeping the edges whose weight lies in ``interval``."""
    out = DynamicGraph(g.n)
    for (u, v), w in g.items():
        if w in interval:
            out.add_edge(u, v, w)
    return out


def floor_log(w: Fraction, base: Fraction) -> int:
    """Largest integer ``j`` with ``base**j <= w`` (exact, ``base > 1``)."""
    if w <= 0 or base <= 1:
        raise ValueError("need w > 0 and base > 1")
    j = math.floor(math.log(w) / math.log(base)) if w.numerator and w.denominator else 0
    while base**j > w:
        j -= 1
    while base ** (j + 1) <= w:
        j += 1
    return j


def pow_ge(w: Fraction, base: Fraction, exponent: Fraction) -> bool:
    """Exact test of ``w >= base**exponent`` for rational ``exponent``."""
    exponent = as_weight(exponent)
    p, q = exponent.numerator, exponent.denominator
    return w**q >= base**p


# --- update events ----------------------------------------------------------


@dataclass(frozen=True)
class UpdateEvent:
    kind: str
    edge: WeightedEdge
    seq: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("i", "d"):
            raise ValueError(f"unknown event kind {self.kind!r}")

    @classmethod
    def insert(cls, u: int, v: int, w: WeightLike, seq: int = 0) -> "UpdateEvent":
        return cls("i", WeightedEdge(u, v, as_weight(w)), seq)

    @classmethod
    def delete(cls, u: int, v: int, w: WeightLike, seq: int = 0) -> "UpdateEvent":
        return cls("d", WeightedEdge(u, v, as_weight(w)), seq)

    @property
    def is_insert(self) -> bool:
        return self.kind == "i"

    @property
    def key(self) -> EdgeKey:
        return self.edge.key


@dataclass(frozen=True)
class GraphDelta:
    kind: str
    edge: WeightedEdge


def apply_update(g: DynamicGraph, ev: UpdateEvent) -> GraphDelta:
    """Mutate ``g`` by one event and return the changed edge.

    Raises :class:`GraphError` on a duplicate insert or a missing delete,
    and on a delete whose stated weight disagrees with the stored one.
    """
    e = ev.edge
    if ev.kind == "i":
        g.add_edge(e.u, e.v, e.w)
        return GraphDelta("i", e)
    if not g.has_edge(e.u, e.v):
        raise GraphError(f"event seq={ev.seq}: delete of missing edge {e.key}")
    stored = g.weight(e.u, e.v)
    if stored != e.w:
        raise GraphError(f"event seq={ev.seq}: delete weight {e.w} != stored {stored} for {e.key}")
    g.remove_edge(e.u, e.v)
    return GraphDelta("d", e)


@dataclass
class MatchingDelta:
    """Edge-level change of a maintained matching."""

    removed: list[EdgeKey] = field(default_factory=list)
    added: list[tuple[EdgeKey, Fraction]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.removed) + len(self.added)

    def extend(self, other: "MatchingDelta") -> None:
        """Compose with a later delta; an edge that leaves and returns (or vice versa) cancels."""
        added = dict(self.added)
        removed = dict.fromkeys(self.removed)
        for key in other.removed:
            if key in added:
                del added[key]
            else:
                removed[key] = None
        for key, w in other.added:
            if key in removed:
                del removed[key]
            else:
                added[key] = w
        self.removed = list(removed)
        self.added = list(added.items())


def diff_matchings(old: Matching, new: Matching) -> MatchingDelta:
    """Delta turning ``old`` into ``new``; removals first, both sorted."""
    ok, nk = old.keys(), new.keys()
    return MatchingDelta(sorted(ok - nk), sorted((k, new.weight_of(k)) for k in nk - ok))


def apply_delta(m: Matching, delta: MatchingDelta) -> None:
    for key in delta.removed:
        m.remove(*key)
    for key, w in delta.added:
        m.add(key[0], key[1], w)
