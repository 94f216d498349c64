"""Dynamic locally greedy census matching over matchings in spread weight classes.

An edge of class ``j`` is in the output exactly when ``j`` is the highest
occupied class at both of its endpoints.  Each vertex keeps its incident
member edges indexed by class; with at most 64 classes the occupied set is a
packed word whose lowest set bit names the highest class, otherwise a sorted
list is used.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .graph import (
    EdgeKey,
    GraphError,
    Matching,
    MatchingDelta,
    MatchingError,
    WeightInterval,
    WeightLike,
    as_weight,
    edge_key,
)

WORD_BITS = 64
MAX_RECOURSE = 3


class _Slots:
    """Class-to-edge map for one vertex, plus a highest-class query."""

    __slots__ = ("k", "edges", "word", "order")

    def __init__(self, k: int) -> None:
        self.k = k
        self.edges: dict[int, EdgeKey] = {}
        self.word = 0
        self.order: Optional[list[int]] = None if k <= WORD_BITS else []

    def add(self, j: int, key: EdgeKey) -> None:
        if j in self.edges:
            raise MatchingError(f"class {j} already has an edge at this vertex")
        self.edges[j] = key
        if self.order is None:
            self.word |= 1 << (self.k - j)
        else:
            insort(self.order, j)

    def remove(self, j: int) -> None:
        del self.edges[j]
        if self.order is None:
            self.word &= ~(1 << (self.k - j))
        else:
            del self.order[bisect_left(self.order, j)]

    def top(self) -> Optional[int]:
        if self.order is None:
            if not self.word:
                return None
            low = (self.word & -self.word).bit_length() - 1
            return self.k - low
        return self.order[-1] if self.order else None

    def __bool__(self) -> bool:
        return bool(self.edges)


class CensusMatcher:
    """State of the census algorithm over classes ``1..k``."""

    def __init__(self, intervals: Sequence[WeightInterval], eps: WeightLike) -> None:
        self.eps = as_weight(eps)
        if not (0 < self.eps <= Fraction(1, 2)):
            raise ValueError(f"eps must lie in (0, 1/2], got {self.eps}")
        ivs = list(intervals)
        for a, b in zip(ivs, ivs[1:]):
            if b.lo == a.lo and b.hi == a.hi:
                raise ValueError(f"duplicate class {a}")
            if b.lo * self.eps < a.hi:
                raise ValueError(f"classes {a} and {b} are not (1/eps)-spread or not ascending")
        self.intervals = ivs
        self.k = len(ivs)
        self.members: list[dict[EdgeKey, Fraction]] = [{} for _ in range(self.k + 1)]
        self.matching = Matching()
        self._slots: dict[int, _Slots] = {}
        self._class: dict[EdgeKey, int] = {}
        self.probes = 0

    # index helpers ----------------------------------------------------------

    def _slot(self, u: int) -> _Slots:
        s = self._slots.get(u)
        if s is None:
            s = self._slots[u] = _Slots(self.k)
        return s

    def _top(self, u: int) -> Optional[int]:
        self.probes += 1
        s = self._slots.get(u)
        return s.top() if s is not None else None

    def _index_add(self, j: int, key: EdgeKey) -> None:
        self._slot(key[0]).add(j, key)
        self._slot(key[1]).add(j, key)

    def _index_remove(self, j: int, key: EdgeKey) -> None:
        for x in key:
            s = self._slots[x]
            s.remove(j)
            if not s:
                del self._slots[x]

    def class_of_edge(self, key: EdgeKey) -> Optional[int]:
        return self._class.get(key)

    def _check_member(self, j: int, w: Fraction) -> None:
        if not 1 <= j <= self.k:
            raise ValueError(f"class index {j} outside 1..{self.k}")
        if w not in self.intervals[j - 1]:
            raise GraphError(f"weight {w} lies outside class {self.intervals[j - 1]}")

    # operations -------------------------------------------------------------

    def initialize(self, matchings: Sequence[Iterable[tuple[EdgeKey, WeightLike]]]) -> MatchingDelta:
        """Load ``M_1..M_k`` (index 0 is class 1) and build the output top-down."""
        if len(matchings) != self.k:
            raise ValueError("need one matching per class")
        if self.matching or any(self.members[1:]):
            raise RuntimeError("initialize on a non-empty census")
        out = MatchingDelta()
        for j in range(self.k, 0, -1):
            seen: set[int] = set()
            for key, w in matchings[j - 1]:
                key, w = edge_key(*key), as_weight(w)
                self._check_member(j, w)
                if key[0] in seen or key[1] in seen:
                    raise MatchingError(f"class {j} input is not a matching")
                seen.update(key)
                if key in self.matching or self.class_of_edge(key) is not None:
                    raise MatchingError(f"edge {key} appears in two classes")
                self.members[j][key] = w
                self._class[key] = j
                if key[0] not in self._slots and key[1] not in self._slots:
                    self.matching.add(key[0], key[1], w)
                    out.added.append((key, w))
                self._index_add(j, key)
        return out

    def insert(self, j: int, u: int, v: int, w: WeightLike) -> MatchingDelta:
        w = as_weight(w)
        key = edge_key(u, v)
        self._check_member(j, w)
        if key in self._class:
            raise MatchingError(f"edge {key} already in class {self._class[key]}")
        self._index_add(j, key)
        self.members[j][key] = w
        self._class[key] = j
        out = MatchingDelta()
        for x in key:
            y = self.matching.mate(x)
            if y is None:
                continue
            other = edge_key(x, y)
            if self.class_of_edge(other) < j:
                self.matching.remove(*other)
                out.removed.append(other)
        if self._top(key[0]) == j and self._top(key[1]) == j:
            self.matching.add(key[0], key[1], w)
            out.added.append((key, w))
        assert len(out) <= MAX_RECOURSE
        return out

    def delete(self, j: int, u: int, v: int) -> MatchingDelta:
        key = edge_key(u, v)
        if key not in self.members[j]:
            raise GraphError(f"edge {key} is not in class {j}")
        self._index_remove(j, key)
        del self.members[j][key]
        del self._class[key]
        out = MatchingDelta()
        if key in self.matching:
            self.matching.remove(*key)
            out.removed.append(key)
        for x in key:
            t = self._top(x)
            if t is None:
                continue
            cand = self._slots[x].edges[t]
            y = cand[0] if cand[1] == x else cand[1]
            if self._top(y) == t and cand not in self.matching:
                w = self.members[t][cand]
                self.matching.add(cand[0], cand[1], w)
                out.added.append((cand, w))
        assert len(out) <= MAX_RECOURSE
        return out

    # audits -----------------------------------------------------------------

    def member_total(self) -> Fraction:
        return sum((sum(m.values(), Fraction(0)) for m in self.members[1:]), Fraction(0))

    def check_invariants(self) -> None:
        """Raise ``AssertionError`` if the characterization or the weight bound fails."""
        for j in range(1, self.k + 1):
            for key in self.members[j]:
                top_both = self._slots[key[0]].top() == j and self._slots[key[1]].top() == j
                assert top_both == (key in self.matching), f"census characterization broken at {key}"
        for key in self.matching:
            assert self.class_of_edge(key) is not None, f"output edge {key} is not a member"
        for u, s in self._slots.items():
            if s.order is None:
                expect = 0
                for j in s.edges:
                    expect |= 1 << (self.k - j)
                assert expect == s.word, f"packed word out of sync at {u}"
        assert self.matching.total >= (1 - 4 * self.eps) * self.member_total()


def census_init(
    matchings: Sequence[Iterable[tuple[EdgeKey, WeightLike]]],
    intervals: Sequence[WeightInterval],
    eps: WeightLike,
) -> CensusMatcher:
    state = CensusMatcher(intervals, eps)
    state.initialize(matchings)
    return state
