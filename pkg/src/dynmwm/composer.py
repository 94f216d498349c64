"""Executable substitution and composition of matchings over weight classes.

``substitute`` replaces the part of a source matching lying in each weight
class by edges of a target matching for that class, deleting a few light
edges first so that every flipped alternating component stays inside its
padded class.  ``compose`` chains substitutions over residue groups of a
wide partition starting from an exact MWM; it is a verification engine, and
``compose_production`` is the oracle-free alternative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .graph import (
    DynamicGraph,
    EdgeKey,
    Matching,
    MatchingError,
    WeightInterval,
    WeightPartition,
    _check_eps,
    as_weight,
    restrict,
)
from .oracle import (
    BudgetExceeded,
    OracleBudget,
    approx_mwm_static,
    components,
    max_weight,
    mwm_any,
    walk_order,
)


class SubstitutionError(ValueError):
    """A plan violates the spread or containment preconditions."""


@dataclass
class SubstitutionPlan:
    """Source matching plus one target matching per weight class.

    ``targets`` pairs each unpadded class ``[l_i, r_i)`` with ``T_i``; the
    target may use any edge of the padded class ``[eps*l_i, r_i/eps)``.
    Classes must be listed in ascending order.
    """

    source: Matching
    targets: Sequence[tuple[WeightInterval, Matching]]
    eps: Fraction

    def __post_init__(self) -> None:
        self.eps = as_weight(self.eps)
        if not (0 < self.eps <= Fraction(1, 2)):
            raise SubstitutionError(f"eps must lie in (0, 1/2], got {self.eps}")
        ivs = [iv for iv, _ in self.targets]
        for a, b in zip(ivs, ivs[1:]):
            if b.lo * self.eps < a.hi:
                raise SubstitutionError(f"classes {a} and {b} are not (1/eps)-spread")
        for iv, t in self.targets:
            pad = iv.padded(self.eps)
            for key, w in t.items():
                if w not in pad:
                    raise SubstitutionError(f"target edge {key} of weight {w} lies outside {pad}")

    @property
    def padded(self) -> list[WeightInterval]:
        return [iv.padded(self.eps) for iv, _ in self.targets]


@dataclass
class CompositionCertificate:
    result: Matching
    deleted_weight: Fraction = Fraction(0)
    substitution_loss: Fraction = Fraction(0)
    phases: int = 1
    bound: Optional[Fraction] = None
    """Lower bound the construction guarantees, when a graph was supplied."""
    deleted: list[EdgeKey] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.bound is None or self.result.total >= self.bound


def _alternating_components(m: Matching, t: Matching) -> list[tuple[list[tuple[EdgeKey, Fraction]], bool]]:
    """Walks of the paths and cycles of ``m (+) t`` with a cycle flag."""
    x = DynamicGraph()
    for key in m.keys() ^ t.keys():
        x.add_edge(key[0], key[1], m.weight_of(key) if key in m else t.weight_of(key))
    return [(walk_order(c), c.is_cycle) for c in components(x)]


def _nearest(walk: list[tuple[EdgeKey, Fraction]], cycle: bool, pos: int, step: int, ok) -> Optional[EdgeKey]:
    n = len(walk)
    i = pos
    for _ in range(n - 1):
        i += step
        if cycle:
            i %= n
        elif not 0 <= i < n:
            return None
        if i == pos:
            return None
        key, w = walk[i]
        if ok(key, w):
            return key
    return None


def _deletion_set(m: Matching, t: Matching, iv: WeightInterval, eps: Fraction) -> set[EdgeKey]:
    lo, hi = iv.lo, iv.hi
    out: set[EdgeKey] = set()
    for walk, cycle in _alternating_components(m, t):
        for pos, (key, w) in enumerate(walk):
            if key not in m:
                continue
            if w >= hi / eps:
                ok = lambda k, x: k in m and x <= hi  # noqa: E731
            elif w >= lo:
                ok = lambda k, x: k in m and x < eps * lo  # noqa: E731
            else:
                continue
            for step in (1, -1):
                hit = _nearest(walk, cycle, pos, step, ok)
                if hit is not None:
                    out.add(hit)
    return out


def _substitute_one(m: Matching, iv: WeightInterval, t: Matching, eps: Fraction) -> tuple[Matching, list[EdgeKey], Fraction]:
    dels = _deletion_set(m, t, iv, eps)
    mt = m.copy()
    for key in sorted(dels):
        mt.remove(*key)
    pad = iv.padded(eps)
    loss = Fraction(0)
    for walk, _ in _alternating_components(mt, t):
        if not any(k in mt and w in iv for k, w in walk):
            continue
        if not all(w in pad for _, w in walk):
            raise MatchingError(f"flipped component escapes the padded class {pad}")
        for key, w in walk:
            if key in mt:
                mt.remove(*key)
                loss += w
        for key, w in walk:
            if key in t:
                mt.add(key[0], key[1], w)
                loss -= w
    return mt, sorted(dels), loss


def substitute(
    plan: SubstitutionPlan,
    graph: Optional[DynamicGraph] = None,
    budget: Optional[OracleBudget] = None,
) -> tuple[Matching, CompositionCertificate]:
    """Run the substitution construction class by class.

    With ``graph`` the certificate also carries the guaranteed lower bound
    ``(1-4eps) w(S) - sum_i (mu_w(padded_i) - w(T_i))``.
    """
    eps = plan.eps
    m = plan.source.copy()
    cert = CompositionCertificate(m)
    for iv, t in plan.targets:
        before = {k: m.weight_of(k) for k in m.keys()}
        m, dels, loss = _substitute_one(m, iv, t, eps)
        cert.deleted.extend(dels)
        cert.deleted_weight += sum((before[k] for k in dels), Fraction(0))
        cert.substitution_loss += loss
    for iv, t in plan.targets:
        for key, w in m.items():
            if w in iv and key not in t:
                raise MatchingError(f"edge {key} in {iv} does not come from its target")
    cert.result = m
    if graph is not None:
        bound = (1 - 4 * eps) * plan.source.total
        for iv, t in plan.targets:
            bound -= max_weight(restrict(graph, iv.padded(eps)), budget) - t.total
        cert.bound = bound
    return m, cert


def phase_count(eps: Fraction, delta: Fraction) -> int:
    """``g``: one more than the least ``k`` with ``delta**k >= eps**-3``."""
    eps, delta = as_weight(eps), as_weight(delta)
    target = 1 / eps**3
    k = 0
    while delta**k < target:
        k += 1
    return k + 1


def compose(
    graph: DynamicGraph,
    matchings: Sequence[Matching],
    partition: WeightPartition,
    eps: Fraction,
    delta: Optional[Fraction] = None,
    budget: Optional[OracleBudget] = None,
    check_inputs: bool = True,
) -> tuple[Matching, CompositionCertificate]:
    """Compose per-class matchings via residue-group substitutions from an exact MWM.

    ``matchings[i]`` is the matching for ``partition.intervals[i]`` on its
    padded class.  Requires the exact oracle for the seed.
    """
    eps = _check_eps(eps)
    delta = as_weight(delta) if delta is not None else partition.delta
    ivs = list(partition.intervals)
    if len(matchings) != len(ivs):
        raise ValueError("need exactly one matching per class")
    if check_inputs:
        for i, (iv, mi) in enumerate(zip(ivs, matchings)):
            opt = max_weight(restrict(graph, iv.padded(eps)), budget)
            if mi.total < (1 - eps) * opt:
                raise MatchingError(f"matching {i} is not (1-eps)-approximate on its padded class")
    g = phase_count(eps, delta)
    seed = mwm_any(graph, budget)
    mu = seed.total
    s = seed
    cert = CompositionCertificate(s, phases=g)
    for j in range(g):
        group = [i for i in range(1, len(ivs) + 1) if i % g == j]
        plan = SubstitutionPlan(s, [(ivs[i - 1], matchings[i - 1]) for i in group], eps)
        s, c = substitute(plan)
        cert.deleted_weight += c.deleted_weight
        cert.substitution_loss += c.substitution_loss
        cert.deleted.extend(c.deleted)
    cert.result = s
    cert.bound = (1 - 7 * g * eps) * mu
    return s, cert


def compose_production(
    matchings: Sequence[Matching],
    eps: Fraction,
    budget: Optional[OracleBudget] = None,
) -> Matching:
    """Oracle-free path: a static approximate MWM on the union of the inputs."""
    union = DynamicGraph()
    for mi in matchings:
        for (u, v), w in mi.items():
            if not union.has_edge(u, v):
                union.add_edge(u, v, w)
    return approx_mwm_static(union, eps, budget)


def greedy_combine(matchings: Sequence[tuple[WeightInterval, Matching]], eps: Fraction) -> Matching:
    """Heaviest-first greedy over the union of matchings in spread classes."""
    eps = _check_eps(eps)
    ivs = sorted((iv for iv, _ in matchings), key=lambda iv: iv.lo)
    for a, b in zip(ivs, ivs[1:]):
        if b.lo * eps < a.hi:
            raise SubstitutionError(f"classes {a} and {b} are not (1/eps)-spread")
    pool: dict[EdgeKey, Fraction] = {}
    for _, mi in matchings:
        pool.update(mi.items())
    out = Matching()
    for key, w in sorted(pool.items(), key=lambda kw: (-kw[1], kw[0])):
        if out.mate(key[0]) is None and out.mate(key[1]) is None:
            out.add(key[0], key[1], w)
    return out


def weight_combination_certificate(
    graph: DynamicGraph,
    intervals: Sequence[WeightInterval],
    eps: Fraction,
    budget: Optional[OracleBudget] = None,
) -> tuple[Fraction, Fraction]:
    """Return ``(sum_i mu_w(G_i), (1+4eps) mu_w(G))``; the first must not exceed the second."""
    eps = _check_eps(eps, Fraction(1, 2))
    lhs = sum((max_weight(restrict(graph, iv), budget) for iv in intervals), Fraction(0))
    return lhs, (1 + 4 * eps) * max_weight(graph, budget)


__all__ = [
    "BudgetExceeded",
    "CompositionCertificate",
    "SubstitutionError",
    "SubstitutionPlan",
    "compose",
    "compose_production",
    "greedy_combine",
    "phase_count",
    "substitute",
    "weight_combination_certificate",
]
