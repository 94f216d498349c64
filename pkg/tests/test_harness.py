from __future__ import annotations

import io
from fractions import Fraction

import pytest

from dynmwm.graph import DynamicGraph, UpdateEvent, apply_update
from dynmwm.harness import (
    BASE_SOLVERS,
    METRICS_HEADER,
    RunConfig,
    TraceModel,
    gen_trace,
    ratio_floor,
    run_trace,
    trace_shape,
)
from dynmwm.trace import read_trace, write_trace


def _metrics(config: RunConfig, events) -> str:
    buf = io.StringIO()
    run_trace(config, events, buf)
    return buf.getvalue()


def test_insert_only_counts():
    ev = gen_trace(TraceModel("insert-only", 12, 10))
    assert len(ev) == 10 and all(e.is_insert for e in ev)


def test_sliding_window_pairs():
    ev = gen_trace(TraceModel("sliding-window", 12, 20, window=5))
    inserts = [e for e in ev if e.is_insert]
    deletes = [e for e in ev if not e.is_insert]
    assert [d.edge.key for d in deletes] == [e.edge.key for e in inserts[: len(deletes)]]
    assert len(deletes) == 15


def test_delete_only_starts_from_initial_graph():
    ev = gen_trace(TraceModel("delete-only", 12, 8, initial=15))
    assert all(e.seq == 0 and e.is_insert for e in ev if e.is_insert)
    assert sum(not e.is_insert for e in ev) == 8


def test_adversarial_gadget_trace():
    ev = gen_trace(TraceModel("adversarial-gadget", 2, 0, levels=4))
    assert len(ev) == 3 * (5 + 3 + 2 + 2 + 1)


@pytest.mark.parametrize("model", ["uniform-random", "sliding-window", "delete-only"])
@pytest.mark.parametrize("weights", ["integer", "decimal", "geometric"])
def test_trace_is_legal_and_roundtrips(model, weights):
    tm = TraceModel(model, 10, 60, weights=weights, seed=3, initial=6, bipartite=True, max_degree=3)
    ev = gen_trace(tm)
    assert ev == gen_trace(tm)
    g = DynamicGraph()
    for e in ev:
        apply_update(g, e)
        assert g.max_degree() <= 3
    buf = io.StringIO()
    write_trace(ev, buf)
    buf.seek(0)
    assert read_trace(buf) == ev


def test_malformed_model():
    with pytest.raises(ValueError):
        gen_trace(TraceModel("nope", 10, 10))
    with pytest.raises(ValueError):
        run_trace(RunConfig("nope"), [])


def test_oracle_ratio_one():
    ev = gen_trace(TraceModel("uniform-random", 10, 80, seed=1))
    rep = run_trace(RunConfig("oracle", oracle_audit=True), ev)
    assert rep.ok and rep.min_ratio == 1
    assert rep.amortized_recourse == Fraction(sum(r.recourse for r in rep.records), rep.updates)


def test_degree_two_error_on_degree_three_trace():
    ev = [UpdateEvent.insert(0, i, 1, i) for i in range(1, 4)]
    rep = run_trace(RunConfig("degree-two"), ev)
    assert not rep.ok and rep.error.startswith("seq 3:")
    assert rep.updates == 2


@pytest.mark.parametrize("solver", BASE_SOLVERS + ("lr/oracle", "lr/framework/standard"))
def test_every_solver_replays(solver):
    ev = gen_trace(TraceModel("uniform-random", 10, 40, seed=2, max_degree=2 if solver == "degree-two" else None))
    rep = run_trace(RunConfig(solver, oracle_audit=True), ev)
    assert rep.ok, rep.error
    assert rep.min_ratio is not None and rep.min_ratio > 0


def test_metrics_deterministic():
    ev = gen_trace(TraceModel("uniform-random", 12, 60, seed=4))
    cfg = RunConfig("framework/standard", oracle_audit=True)
    a, b = _metrics(cfg, ev), _metrics(cfg, ev)
    assert a == b
    assert a.splitlines()[0] == ",".join(METRICS_HEADER)


def test_geometric_weights_are_rescaled():
    ev = gen_trace(TraceModel("uniform-random", 10, 40, w_max=10**6, weights="geometric", seed=5))
    shape = trace_shape(ev)
    assert shape.W > 1
    assert run_trace(RunConfig("framework/ultimate", oracle_audit=True), ev).ok


def test_ratio_floors():
    assert ratio_floor(RunConfig("oracle")) == 1
    assert ratio_floor(RunConfig("degree-two")) == Fraction(4, 5)
    assert ratio_floor(RunConfig("lr/oracle")) is None
