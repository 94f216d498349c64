"""Trace generation, solver registry and audited trace replay.

All randomness comes from one ``random.Random(seed)`` instance (the "trace
generator"); solvers are deterministic, so a config and a trace fully
determine the metrics file.
"""

from __future__ import annotations

import csv
import io
import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from .adversarial import gen_partition_counterexample
from .degree_two import DegreeTwoSolver
from .framework import FrameworkSolver, compose_ratio_floor
from .graph import (
    DynamicGraph,
    EdgeKey,
    GraphError,
    Matching,
    MatchingError,
    UpdateEvent,
    WeightedEdge,
    apply_delta,
    apply_update,
    as_weight,
    edge_key,
)
from .low_degree import LowDegreeSolver
from .low_recourse import LowRecourseSolver
from .oracle import BudgetExceeded, OracleBudget, default_budget
from .solver import DynamicMatcher, MatcherFactory, ScaledMatcher, churn_factory, exact_reference, oracle_factory
from .trace import format_decimal, split_initial
from .unfold import BdlSolver

TRACE_MODELS = ("uniform-random", "insert-only", "delete-only", "sliding-window", "adversarial-gadget")
WEIGHT_MODELS = ("integer", "decimal", "geometric")
BASE_SOLVERS = (
    "oracle",
    "framework/standard",
    "framework/tree",
    "framework/ultimate",
    "census-only",
    "degree-two",
    "low-degree",
    "bdl",
)
LR_PREFIX = "lr/"
INNER_SOLVERS = ("oracle", "churn")
METRICS_HEADER = ("seq", "op", "u", "v", "w", "weight", "recourse", "ratio")


# --- trace generation --------------------------------------------------------


@dataclass(frozen=True)
class TraceModel:
    model: str
    n: int
    events: int
    w_max: int = 100
    weights: str = "integer"
    seed: int = 0
    window: int = 5
    initial: int = 0
    bipartite: bool = False
    max_degree: Optional[int] = None
    levels: int = 4

    def validate(self) -> None:
        if self.model not in TRACE_MODELS:
            raise ValueError(f"unknown trace model {self.model!r}")
        if self.weights not in WEIGHT_MODELS:
            raise ValueError(f"unknown weight model {self.weights!r}")
        if self.n < 2 or self.events < 0 or self.w_max < 1 or self.window < 1 or self.initial < 0:
            raise ValueError("n >= 2, events >= 0, w_max >= 1, window >= 1 and initial >= 0 required")
        if self.bipartite and self.n < 2:
            raise ValueError("a bipartite trace needs two sides")


class _TraceBuilder:
    def __init__(self, model: TraceModel) -> None:
        self.m = model
        self.rng = random.Random(model.seed)
        self.g = DynamicGraph()
        self.out: list[UpdateEvent] = []

    def weight(self) -> Fraction:
        m, rng = self.m, self.rng
        if m.weights == "integer":
            return Fraction(rng.randint(1, m.w_max))
        if m.weights == "decimal":
            return Fraction(rng.randint(100, 100 * m.w_max), 100)
        # log-uniform, rounded to two decimals
        x = m.w_max ** rng.random()
        return max(Fraction(1), min(Fraction(m.w_max), Fraction(round(x * 100), 100)))

    def allowed(self, u: int, v: int) -> bool:
        m = self.m
        if u == v or self.g.has_edge(u, v):
            return False
        if m.bipartite and (u < m.n // 2) == (v < m.n // 2):
            return False
        if m.max_degree is not None and (self.g.degree(u) >= m.max_degree or self.g.degree(v) >= m.max_degree):
            return False
        return True

    def pick_pair(self) -> Optional[EdgeKey]:
        n = self.m.n
        for _ in range(64):
            u, v = self.rng.randrange(n), self.rng.randrange(n)
            if self.allowed(u, v):
                return edge_key(u, v)
        free = [(u, v) for u in range(n) for v in range(u + 1, n) if self.allowed(u, v)]
        return self.rng.choice(free) if free else None

    def insert(self, seq: int) -> Optional[EdgeKey]:
        key = self.pick_pair()
        if key is None:
            return None
        w = self.weight()
        self.g.add_edge(key[0], key[1], w)
        self.out.append(UpdateEvent.insert(key[0], key[1], w, seq))
        return key

    def delete(self, key: EdgeKey, seq: int) -> None:
        w = self.g.remove_edge(*key)
        self.out.append(UpdateEvent.delete(key[0], key[1], w, seq))

    def delete_random(self, seq: int) -> bool:
        keys = self.g.keys()
        if not keys:
            return False
        self.delete(self.rng.choice(keys), seq)
        return True


def gen_trace(model: TraceModel) -> list[UpdateEvent]:
    """Deterministic event list for ``model``; ``seq == 0`` records form the initial graph."""
    model.validate()
    b = _TraceBuilder(model)
    if model.model == "adversarial-gadget":
        return gen_partition_counterexample(model.levels).events()[: model.events or None]
    if model.model == "delete-only":
        for _ in range(model.initial or model.events):
            if b.insert(0) is None:
                break
        for seq in range(1, model.events + 1):
            if not b.delete_random(seq):
                break
        return b.out
    for _ in range(model.initial):
        if b.insert(0) is None:
            break
    if model.model == "insert-only":
        for seq in range(1, model.events + 1):
            if b.insert(seq) is None:
                break
        return b.out
    if model.model == "sliding-window":
        live: list[EdgeKey] = []
        seq = 1
        for k in range(1, model.events + 1):
            if k > model.window:
                b.delete(live.pop(0), seq)
                seq += 1
            key = b.insert(seq)
            if key is None:
                break
            live.append(key)
            seq += 1
        return b.out
    for seq in range(1, model.events + 1):
        if b.g.m and b.rng.random() < 0.5:
            b.delete_random(seq)
        elif b.insert(seq) is None:
            b.delete_random(seq)
    return b.out


# --- solver registry ---------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    solver: str
    eps: Fraction = Fraction(1, 10)
    inner: str = "oracle"
    depth: int = 1
    oracle_audit: bool = False
    seed: int = 0
    timing: bool = False

    def validate(self) -> None:
        base = self.solver[len(LR_PREFIX) :] if self.solver.startswith(LR_PREFIX) else self.solver
        if base not in BASE_SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; choose from {', '.join(BASE_SOLVERS)} (optionally prefixed {LR_PREFIX!r})")
        if self.inner not in INNER_SOLVERS:
            raise ValueError(f"unknown inner solver {self.inner!r}")


@dataclass
class TraceShape:
    """Weight range and maximum degree seen anywhere in a trace."""

    w_min: Fraction
    w_max: Fraction
    max_degree: int
    integral: bool

    @property
    def W(self) -> Fraction:
        return self.w_max / self.w_min


def trace_shape(events: list[UpdateEvent]) -> TraceShape:
    ws = [ev.edge.w for ev in events] or [Fraction(1)]
    g = DynamicGraph()
    deg = 0
    for ev in events:
        apply_update(g, ev)
        if ev.is_insert:
            deg = max(deg, g.degree(ev.edge.u), g.degree(ev.edge.v))
    return TraceShape(min(ws), max(ws), deg, all(w.denominator == 1 for w in ws))


def _inner_factory(name: str, budget: Optional[OracleBudget]) -> MatcherFactory:
    return oracle_factory(budget) if name == "oracle" else churn_factory(budget)


def _base_factory(config: RunConfig, base: str, shape: TraceShape, budget: Optional[OracleBudget]) -> MatcherFactory:
    """Factory over weights in ``[1, W]`` (the harness rescales by ``w_min``)."""
    inner = _inner_factory(config.inner, budget)
    if base == "oracle":
        return inner
    if base == "degree-two":
        return lambda eps, W: DegreeTwoSolver(eps)
    if base == "low-degree":
        cap = max(2, shape.max_degree)
        return lambda eps, W: LowDegreeSolver(eps, W, cap, budget=budget)
    if base == "bdl":
        return lambda eps, W: BdlSolver(eps, int(W), budget=budget)
    mode = {"framework/standard": "standard", "framework/tree": "tree", "framework/ultimate": "ultimate", "census-only": "census-only"}[base]
    return lambda eps, W: FrameworkSolver(eps, W, inner, mode=mode, depth=config.depth)


def build_solver(config: RunConfig, shape: TraceShape, budget: Optional[OracleBudget] = None) -> DynamicMatcher:
    config.validate()
    wrapped = config.solver.startswith(LR_PREFIX)
    base = config.solver[len(LR_PREFIX) :] if wrapped else config.solver
    if base == "bdl":
        if not shape.integral:
            raise GraphError("bdl needs integer weights")
        W, unit = Fraction(int(shape.w_max)), Fraction(1)
    else:
        W, unit = max(Fraction(1), shape.W), shape.w_min
    factory = _base_factory(config, base, shape, budget)
    solver = LowRecourseSolver(config.eps, W, factory) if wrapped else factory(config.eps, W)
    solver = ScaledMatcher(solver, unit) if unit != 1 else solver
    solver.name = config.solver
    return solver


def ratio_floor(config: RunConfig) -> Optional[Fraction]:
    """Documented worst-case ratio of the configured solver, or ``None`` when none is claimed."""
    eps = as_weight(config.eps)
    if config.solver.startswith(LR_PREFIX):
        return None
    return {
        "oracle": Fraction(1),
        "framework/standard": compose_ratio_floor(eps, "standard"),
        "census-only": compose_ratio_floor(eps, "standard"),
        "framework/tree": compose_ratio_floor(eps, "tree", config.depth),
        "framework/ultimate": compose_ratio_floor(eps, "ultimate"),
        "degree-two": 1 - 2 * eps,
        "low-degree": None,
        "bdl": 1 - 5 * eps,
    }[config.solver]


# --- replay ------------------------------------------------------------------


@dataclass
class UpdateRecord:
    seq: int
    op: str
    key: EdgeKey
    w: Fraction
    weight: Fraction
    recourse: int
    ratio: Optional[Fraction]
    wall: float


@dataclass
class SolverReport:
    config: RunConfig
    records: list[UpdateRecord] = field(default_factory=list)
    initial_recourse: int = 0
    error: Optional[str] = None

    @property
    def updates(self) -> int:
        return len(self.records)

    @property
    def total_recourse(self) -> int:
        return sum(r.recourse for r in self.records)

    @property
    def amortized_recourse(self) -> Fraction:
        return Fraction(self.total_recourse, self.updates) if self.records else Fraction(0)

    def _ratios(self) -> list[Fraction]:
        return [r.ratio for r in self.records if r.ratio is not None]

    @property
    def min_ratio(self) -> Optional[Fraction]:
        rs = self._ratios()
        return min(rs) if rs else None

    @property
    def mean_ratio(self) -> Optional[Fraction]:
        rs = self._ratios()
        return sum(rs, Fraction(0)) / len(rs) if rs else None

    @property
    def ok(self) -> bool:
        return self.error is None

    def summary(self) -> dict[str, object]:
        def f(x: Optional[Fraction]) -> Optional[str]:
            return None if x is None else f"{float(x):.6f}"

        cfg = asdict(self.config)
        cfg["eps"] = str(self.config.eps)
        return {
            "config": cfg,
            "updates": self.updates,
            "total_recourse": self.total_recourse,
            "amortized_recourse": f(self.amortized_recourse),
            "min_ratio": f(self.min_ratio),
            "mean_ratio": f(self.mean_ratio),
            "error": self.error,
        }


def _fmt_weight(w: Fraction) -> str:
    try:
        return format_decimal(w)
    except ValueError:
        return f"{w.numerator}/{w.denominator}"


def write_metrics(report: SolverReport, out: Union[str, Path, io.TextIOBase]) -> None:
    """One CSV row per update; wall time only when the config asks for it."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(METRICS_HEADER + (("wall_s",) if report.config.timing else ()))
    for r in report.records:
        row = [r.seq, r.op, r.key[0], r.key[1], _fmt_weight(r.w), _fmt_weight(r.weight), r.recourse]
        row.append("" if r.ratio is None else f"{float(r.ratio):.9f}")
        if report.config.timing:
            row.append(f"{r.wall:.6f}")
        writer.writerow(row)
    if isinstance(out, (str, Path)):
        Path(out).write_text(buf.getvalue())
    else:
        out.write(buf.getvalue())


def _hard_checks(solver: DynamicMatcher) -> None:
    for obj in (solver, getattr(solver, "inner", None)):
        if obj is None:
            continue
        for name in ("check_invariants", "check_cadence", "check_routing"):
            check = getattr(obj, name, None)
            if callable(check):
                check()


def run_trace(
    config: RunConfig,
    events: list[UpdateEvent],
    metrics: Union[str, Path, io.TextIOBase, None] = None,
    budget: Optional[OracleBudget] = None,
) -> SolverReport:
    """Replay ``events`` through the configured solver, auditing as configured."""
    budget = budget or default_budget()
    report = SolverReport(config)
    config.validate()
    initial, updates = split_initial(events)
    graph = DynamicGraph()
    shadow = Matching()
    seq = 0
    try:
        solver = build_solver(config, trace_shape(events), budget)
        for ev in initial:
            apply_update(graph, ev)
        delta = solver.initialize(ev.edge for ev in initial)
        apply_delta(shadow, delta)
        report.initial_recourse = len(delta)
        for ev in updates:
            seq = ev.seq
            apply_update(graph, ev)
            t0 = time.perf_counter()
            delta = solver.update(ev)
            wall = time.perf_counter() - t0
            apply_delta(shadow, delta)
            if shadow != solver.matching:
                raise MatchingError("reported delta does not reproduce the maintained matching")
            if not solver.matching.is_valid_in(graph):
                raise MatchingError("maintained matching is not a matching of the current graph")
            ratio = None
            if config.oracle_audit:
                _hard_checks(solver)
                try:
                    mu = exact_reference(graph, budget).total
                    ratio = solver.matching.total / mu if mu else Fraction(1)
                except BudgetExceeded:
                    ratio = None
            report.records.append(UpdateRecord(ev.seq, ev.kind, ev.edge.key, ev.edge.w, solver.matching.total, len(delta), ratio, wall))
    except (GraphError, MatchingError, AssertionError) as exc:
        report.error = f"seq {seq}: {type(exc).__name__}: {exc}"
    if metrics is not None:
        write_metrics(report, metrics)
    return report


def edges_of(events: list[UpdateEvent]) -> list[WeightedEdge]:
    return [ev.edge for ev in events if ev.is_insert]
