"""Lower-bound instances built from three-edge gadgets, with exact certifiers.

A level-``i`` gadget with base ``beta`` is the path ``a - b - c`` with
weights ``beta**i, beta**i, beta**(i+1)``; ``b`` and ``c`` share a vertex.
Gadgets are vertex-disjoint, so every certificate is computed per gadget
shape and multiplied by its count.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .graph import (
    DynamicGraph,
    EdgeKey,
    GraphError,
    Matching,
    UpdateEvent,
    WeightInterval,
    as_weight,
)
from .oracle import enumerate_approx_mwms, mwm_any

PARTITION_BASE = Fraction(3, 2)


@dataclass(frozen=True)
class GadgetSpec:
    level: int
    beta: Fraction

    @property
    def weights(self) -> tuple[Fraction, Fraction, Fraction]:
        low = self.beta**self.level
        return low, low, low * self.beta

    @property
    def mwm(self) -> Fraction:
        return self.beta**self.level * (1 + self.beta)

    @property
    def broken(self) -> Fraction:
        """Union value when ``a, b`` share a class that picks ``b`` and ``c`` sits above."""
        return self.beta ** (self.level + 1)


@dataclass
class Gadget:
    spec: GadgetSpec
    a: EdgeKey
    b: EdgeKey
    c: EdgeKey


@dataclass
class GadgetInstance:
    beta: Fraction
    N: int
    counts: dict[int, int]
    graph: DynamicGraph = field(default_factory=DynamicGraph)
    gadgets: list[Gadget] = field(default_factory=list)

    def mu(self) -> Fraction:
        return sum((GadgetSpec(i, self.beta).mwm * c for i, c in self.counts.items()), Fraction(0))

    def events(self) -> list[UpdateEvent]:
        """The instance as an insert-only update stream."""
        return [UpdateEvent.insert(e.u, e.v, e.w, seq) for seq, e in enumerate(self.graph.edges(), 1)]

    def check_structure(self) -> None:
        """Every component is one of the generated three-edge paths."""
        for comp in self.graph.components():
            assert len(comp) == 4, f"component of size {len(comp)}"
        for gd in self.gadgets:
            assert gd.b[1] == gd.c[0] and gd.a[1] == gd.b[0]


def _round_half_up(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def build_gadgets(beta: Fraction, counts: dict[int, int], N: int) -> GadgetInstance:
    inst = GadgetInstance(beta, N, dict(counts))
    x = 0
    for level in sorted(counts):
        spec = GadgetSpec(level, beta)
        wa, wb, wc = spec.weights
        for _ in range(counts[level]):
            inst.graph.add_edge(x, x + 1, wa)
            inst.graph.add_edge(x + 1, x + 2, wb)
            inst.graph.add_edge(x + 2, x + 3, wc)
            inst.gadgets.append(Gadget(spec, (x, x + 1), (x + 1, x + 2), (x + 2, x + 3)))
            x += 4
    return inst


# --- weight partitions -------------------------------------------------------


def gen_partition_counterexample(N: int) -> GadgetInstance:
    """``round(1.5**(N - i))`` level-``i`` gadgets for ``i = 0..N``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    counts = {i: _round_half_up(PARTITION_BASE ** (N - i)) for i in range(N + 1)}
    return build_gadgets(PARTITION_BASE, counts, N)


def _class_of(w: Fraction, intervals: Sequence[WeightInterval]) -> Optional[int]:
    for c, iv in enumerate(intervals):
        if w in iv:
            return c
    return None


def _path_graph(keys_weights: Iterable[tuple[EdgeKey, Fraction]]) -> DynamicGraph:
    g = DynamicGraph()
    for (u, v), w in keys_weights:
        g.add_edge(u, v, w)
    return g


def adversarial_gadget_value(spec: GadgetSpec, intervals: Sequence[WeightInterval]) -> Fraction:
    """Smallest ``mu_w`` of a union of per-class maximum weight matchings on one gadget."""
    wa, _, wc = spec.weights
    ca, cc = _class_of(wa, intervals), _class_of(wc, intervals)
    if ca is None or cc is None:
        raise GraphError(f"gadget weights of level {spec.level} are not covered")
    return _gadget_value(spec, ca == cc)


@lru_cache(maxsize=None)
def _gadget_value(spec: GadgetSpec, together: bool) -> Fraction:
    wa, wb, wc = spec.weights
    edges = {(0, 1): wa, (1, 2): wb, (2, 3): wc}
    groups = [list(edges.items())] if together else [[((0, 1), wa), ((1, 2), wb)], [((2, 3), wc)]]
    choices = [enumerate_approx_mwms(_path_graph(kw), Fraction(0), mode="all") for kw in groups]
    best: Optional[Fraction] = None
    for pick in itertools.product(*choices):
        union = _path_graph((k, edges[k]) for m in pick for k in m)
        val = mwm_any(union).total
        best = val if best is None else min(best, val)
    assert best is not None
    return best


@dataclass
class PartitionVerdict:
    loss: Fraction
    mu: Fraction
    delta: Fraction
    broken_levels: list[int]
    max_width: Fraction
    width_threshold: float

    @property
    def exceeds(self) -> bool:
        """Adversarial loss is above ``delta * mu``."""
        return self.loss > self.delta * self.mu

    @property
    def consistent(self) -> bool:
        """If the loss is affordable then some class is at least threshold-wide."""
        return self.exceeds or float(self.max_width) >= self.width_threshold


def partition_width_threshold(N: int, delta: Fraction) -> float:
    return float(PARTITION_BASE) ** (N / (2.5 * float(delta) * N + 1))


def certify_partition_loss(inst: GadgetInstance, partition: Sequence[WeightInterval], delta: Fraction) -> PartitionVerdict:
    """Exact adversarial loss of ``inst`` under per-class maximum weight matchings."""
    delta = as_weight(delta)
    ivs = list(partition)
    for a, b in zip(ivs, ivs[1:]):
        if a.hi != b.lo:
            raise GraphError(f"classes {a} and {b} are not contiguous")
    loss = Fraction(0)
    for level, count in inst.counts.items():
        spec = GadgetSpec(level, inst.beta)
        loss += count * (spec.mwm - adversarial_gadget_value(spec, ivs))
    broken = []
    for iv in ivs[:-1]:
        j = math.floor(math.log(iv.hi, float(inst.beta)))
        while inst.beta**j >= iv.hi:
            j -= 1
        while inst.beta ** (j + 1) < iv.hi:
            j += 1
        if j in inst.counts:
            broken.append(j)
    return PartitionVerdict(
        loss=loss,
        mu=inst.mu(),
        delta=delta,
        broken_levels=broken,
        max_width=max(iv.hi / iv.lo for iv in ivs),
        width_threshold=partition_width_threshold(inst.N, delta),
    )


# --- alpha-approximation -----------------------------------------------------


def alpha_beta(alpha: Fraction) -> Fraction:
    """``beta`` with ``beta / (beta + 1) = alpha``."""
    alpha = as_weight(alpha)
    if not Fraction(1, 2) < alpha < 1:
        raise ValueError(f"alpha must lie in (1/2, 1), got {alpha}")
    return alpha / (1 - alpha)


def alpha_gap(alpha: Fraction) -> Fraction:
    alpha = as_weight(alpha)
    return alpha - alpha**2 - (1 - alpha) ** 2


def alpha_levels(alpha: Fraction, delta: Fraction) -> int:
    """``N = floor(gap / delta - 1)``."""
    return math.floor(alpha_gap(alpha) / as_weight(delta) - 1)


def alpha_delta(alpha: Fraction, N: int) -> Fraction:
    """Largest ``delta`` for which :func:`alpha_levels` returns ``N``."""
    return alpha_gap(alpha) / (N + 1)


@dataclass
class AlphaInstance(GadgetInstance):
    alpha: Fraction = Fraction(0)
    sparsifier: set[EdgeKey] = field(default_factory=set)


def gen_alpha_counterexample(alpha: Fraction, N: Optional[int] = None, delta: Optional[Fraction] = None) -> AlphaInstance:
    """Levels ``0..N-1``; counts are ``s * beta**(N - i)`` for the least ``s`` making
    every count and the kept share of top-level ``c`` edges integral."""
    alpha = as_weight(alpha)
    beta = alpha_beta(alpha)
    if N is None:
        if delta is None:
            raise ValueError("give N or delta")
        N = alpha_levels(alpha, delta)
    if N < 2:
        raise ValueError("N must be at least 2")
    ideal = {i: beta ** (N - i) for i in range(N)}
    s = 1
    for x in list(ideal.values()) + [alpha * ideal[N - 1]]:
        s = s * x.denominator // math.gcd(s, x.denominator)
    counts = {i: int(x * s) for i, x in ideal.items()}
    base = build_gadgets(beta, counts, N)
    inst = AlphaInstance(beta, N, counts, base.graph, base.gadgets, alpha=alpha)
    keep_top = int(alpha * counts[N - 1])
    seen_top = 0
    for gd in inst.gadgets:
        lvl = gd.spec.level
        inst.sparsifier.add(gd.b)
        if lvl <= N - 2:
            inst.sparsifier.add(gd.c)
        elif seen_top < keep_top:
            inst.sparsifier.add(gd.c)
            seen_top += 1
    return inst


def _class_best(inst: AlphaInstance, iv: WeightInterval, within_s: bool) -> Fraction:
    # gadgets of equal level and equal sparsifier footprint share a value
    shapes: dict[tuple[int, bool], int] = {}
    for gd in inst.gadgets:
        shape = (gd.spec.level, gd.c in inst.sparsifier)
        shapes[shape] = shapes.get(shape, 0) + 1
    total = Fraction(0)
    for (level, has_c), count in shapes.items():
        spec = GadgetSpec(level, inst.beta)
        wa, wb, wc = spec.weights
        parts = [((0, 1), wa, False), ((1, 2), wb, True), ((2, 3), wc, has_c)]
        g = _path_graph((k, w) for k, w, in_s in parts if w in iv and (in_s or not within_s))
        total += count * mwm_any(g).total
    return total


@dataclass
class AlphaVerdict:
    alpha: Fraction
    classes_checked: int
    failures: list[WeightInterval]
    ratio: Fraction
    formula: Fraction
    delta: Fraction

    @property
    def holds(self) -> bool:
        """Every class is served by the sparsifier, yet the sparsifier stays below ``alpha - delta``."""
        return not self.failures and self.ratio == self.formula and self.ratio < self.alpha - self.delta


def certify_alpha(inst: AlphaInstance, classes: Sequence[WeightInterval], delta: Optional[Fraction] = None) -> AlphaVerdict:
    """Check the sparsifier against each class and the global ratio formula.

    Classes containing every weight of the instance are skipped.
    """
    alpha = inst.alpha
    delta = alpha_delta(alpha, inst.N) if delta is None else as_weight(delta)
    weights = {w for _, w in inst.graph.items()}
    failures = []
    checked = 0
    for iv in classes:
        if all(w in iv for w in weights):
            continue
        checked += 1
        if _class_best(inst, iv, True) < alpha * _class_best(inst, iv, False):
            failures.append(iv)
    full = WeightInterval(min(weights), max(weights) + 1)
    ratio = _class_best(inst, full, True) / inst.mu()
    formula = alpha - alpha_gap(alpha) / inst.N
    return AlphaVerdict(alpha, checked, failures, ratio, formula, delta)


def dyadic_classes(lo_exp: int, hi_exp: int) -> list[WeightInterval]:
    """Every ``[2**a, 2**b)`` with ``lo_exp <= a < b <= hi_exp``."""
    two = Fraction(2)
    return [WeightInterval(two**a, two**b) for a in range(lo_exp, hi_exp) for b in range(a + 1, hi_exp + 1)]


def matching_in(inst: GadgetInstance, keys: Iterable[EdgeKey]) -> Matching:
    return mwm_any(inst.graph.subgraph(keys))
