"""``dynmwm`` command line: gen, run, audit and gadget subcommands."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .adversarial import (
    alpha_delta,
    certify_alpha,
    certify_partition_loss,
    dyadic_classes,
    gen_alpha_counterexample,
    gen_partition_counterexample,
)
from .graph import WeightInterval
from .harness import (
    BASE_SOLVERS,
    INNER_SOLVERS,
    LR_PREFIX,
    TRACE_MODELS,
    WEIGHT_MODELS,
    RunConfig,
    TraceModel,
    gen_trace,
    ratio_floor,
    run_trace,
)
from .trace import read_trace, write_trace


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trace", required=True, help="trace file to replay")
    p.add_argument("--solver", required=True, help=f"one of {', '.join(BASE_SOLVERS)}, optionally prefixed {LR_PREFIX}")
    p.add_argument("--inner", default="oracle", choices=INNER_SOLVERS)
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 10))
    p.add_argument("--depth", type=int, default=1, help="tree depth for framework/tree")
    p.add_argument("--out", help="metrics CSV path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timing", action="store_true", help="add a wall-time column (breaks byte-identical reruns)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynmwm", description="Dynamic approximate maximum weight matching harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a trace")
    g.add_argument("--model", choices=TRACE_MODELS, default="uniform-random")
    g.add_argument("--n", type=int, default=12)
    g.add_argument("--events", type=int, default=100)
    g.add_argument("--w-max", type=int, default=100)
    g.add_argument("--weights", choices=WEIGHT_MODELS, default="integer")
    g.add_argument("--window", type=int, default=5)
    g.add_argument("--initial", type=int, default=0)
    g.add_argument("--bipartite", action="store_true")
    g.add_argument("--max-degree", type=int)
    g.add_argument("--levels", type=int, default=4, help="gadget levels for adversarial-gadget")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    r = sub.add_parser("run", help="replay a trace")
    _add_run_flags(r)
    r.add_argument("--oracle-audit", action="store_true")

    a = sub.add_parser("audit", help="replay with oracle audit and check the ratio floor")
    _add_run_flags(a)
    a.add_argument("--min-ratio", type=_fraction, help="override the documented floor")

    k = sub.add_parser("gadget", help="emit and certify a lower-bound instance")
    k.add_argument("--kind", choices=("partition", "alpha"), default="partition")
    k.add_argument("--levels", type=int, default=20)
    k.add_argument("--delta", type=_fraction, default=Fraction(1, 10))
    k.add_argument("--alpha", type=_fraction, default=Fraction(2, 3))
    k.add_argument("--width", type=_fraction, help="class width of the geometric test partition")
    k.add_argument("--out", help="trace path for the instance")
    return parser


def _config(args: argparse.Namespace, audit: bool) -> RunConfig:
    return RunConfig(args.solver, args.eps, args.inner, args.depth, audit, args.seed, args.timing)


def _cmd_gen(args: argparse.Namespace) -> int:
    model = TraceModel(
        args.model, args.n, args.events, args.w_max, args.weights, args.seed,
        args.window, args.initial, args.bipartite, args.max_degree, args.levels,
    )
    events = gen_trace(model)
    write_trace(events, args.out)
    print(f"wrote {len(events)} records to {args.out}")
    return 0


def _cmd_run(args: argparse.Namespace, audit: bool) -> int:
    config = _config(args, audit)
    report = run_trace(config, read_trace(args.trace), args.out)
    summary = report.summary()
    status = 0 if report.ok else 2
    if args.command == "audit":
        floor = args.min_ratio if args.min_ratio is not None else ratio_floor(config)
        summary["ratio_floor"] = None if floor is None else f"{float(floor):.6f}"
        if floor is not None and report.min_ratio is not None and report.min_ratio < floor:
            status = status or 1
    print(json.dumps(summary, indent=2, sort_keys=True))
    return status


def _cmd_gadget(args: argparse.Namespace) -> int:
    if args.kind == "partition":
        inst = gen_partition_counterexample(args.levels)
        width = args.width or Fraction(3, 2)
        top = max(w for _, w in inst.graph.items())
        ivs = [WeightInterval(Fraction(1), width)]
        while ivs[-1].hi <= top:
            ivs.append(WeightInterval(ivs[-1].hi, ivs[-1].hi * width))
        v = certify_partition_loss(inst, ivs, args.delta)
        out = {
            "gadgets": len(inst.gadgets),
            "mu": str(v.mu),
            "classes": len(ivs),
            "loss": str(v.loss),
            "loss_exceeds_delta_mu": v.exceeds,
            "width_threshold": f"{v.width_threshold:.6f}",
            "consistent": v.consistent,
        }
        ok = v.consistent
    else:
        ainst = gen_alpha_counterexample(args.alpha, args.levels)
        av = certify_alpha(ainst, dyadic_classes(-1, ainst.N + 2), alpha_delta(args.alpha, ainst.N))
        inst = ainst
        out = {
            "gadgets": len(ainst.gadgets),
            "classes_checked": av.classes_checked,
            "class_failures": len(av.failures),
            "sparsifier_ratio": str(av.ratio),
            "formula": str(av.formula),
            "alpha_minus_delta": str(av.alpha - av.delta),
            "holds": av.holds,
        }
        ok = av.holds
    if args.out:
        write_trace(inst.events(), args.out)
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0 if ok else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command in ("run", "audit"):
            return _cmd_run(args, audit=args.command == "audit" or args.oracle_audit)
        return _cmd_gadget(args)
    except (ValueError, OSError) as exc:
        print(f"dynmwm: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
