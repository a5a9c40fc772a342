"""Command line entry point: ``tollbooth gen|solve|eval|oracle|bench``.

Exit codes: 0 success, 2 validation error, 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import ExperimentConfig, generate_instance, rows_to_csv, run_suite
from .classification import classify, solve_full
from .decomp_solver import CapExceeded, SolverConfig
from .decomposition import decomposition_to_dot
from .model import (
    ValidationError,
    dumps,
    evaluate_revenue,
    instance_to_dict,
    load_instance,
    load_scheme,
    scheme_to_dict,
)
from .oracle import brute_force_opt

EXIT_VALIDATION = 2
EXIT_CAP = 3


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> None:
    inst = generate_instance(args.edges, args.customers, args.budget_max, args.seed, args.budget_dist)
    _emit(dumps(instance_to_dict(inst)), args.out)


def cmd_solve(args) -> None:
    inst = load_instance(args.input)
    config = SolverConfig(
        max_guesses=args.max_guesses,
        max_choices=args.max_choices,
        fallback_trials=args.fallback_trials,
        allow_fallback=not args.no_fallback,
    )
    scheme, report = solve_full(inst, args.mode, args.seed, config)
    _emit(dumps(scheme_to_dict(scheme)), args.out)
    report_text = dumps(report.to_dict(timing=not args.no_timing))
    if args.report:
        Path(args.report).write_text(report_text)
    else:
        sys.stderr.write(report_text)
    if args.emit_dot:
        classified = classify(inst)
        if classified.levels and classified.levels[0]:
            dot = decomposition_to_dot(inst.tree, classified.levels[0][0].decomposition)
        else:
            dot = "graph decomposition {\n}\n"
        Path(args.emit_dot).write_text(dot)


def cmd_eval(args) -> None:
    inst = load_instance(args.input)
    scheme = load_scheme(args.prices, inst.m)
    total, per_customer = evaluate_revenue(inst, scheme)
    _emit(dumps({"revenue": str(total), "per_customer": [str(r) for r in per_customer]}), None)


def cmd_oracle(args) -> None:
    inst = load_instance(args.input)
    result = brute_force_opt(inst, args.max_edges, args.max_customers)
    out = {
        "opt": str(result.opt_revenue),
        "prices": scheme_to_dict(result.opt_scheme)["prices"],
        "winners": sorted(result.winner_set),
    }
    _emit(dumps(out), None)


def cmd_bench(args) -> None:
    config = ExperimentConfig.from_json(args.config)
    if args.csv:
        config.output = None
    rows = run_suite(config)
    text = rows_to_csv(rows)
    if args.csv:
        Path(args.csv).write_text(text)
    elif not config.output:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tollbooth", description="Tollbooth pricing on trees.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--customers", type=int, required=True)
    p.add_argument("--budget-max", type=int, default=10)
    p.add_argument("--budget-dist", choices=["int", "rational"], default="int")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run the approximation algorithm")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=["derandomized", "randomized"], default="derandomized")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--report", help="write the JSON report here instead of stderr")
    p.add_argument("--no-timing", action="store_true", help="omit wall time from the report")
    p.add_argument("--emit-dot", help="write the top-level decomposition as Graphviz")
    p.add_argument("--max-guesses", type=int, default=SolverConfig.max_guesses)
    p.add_argument("--max-choices", type=int, default=SolverConfig.max_choices)
    p.add_argument("--fallback-trials", type=int, default=SolverConfig.fallback_trials)
    p.add_argument("--no-fallback", action="store_true", help="fail instead of sampling above the caps")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eval", help="revenue of a pricing scheme")
    p.add_argument("--input", required=True)
    p.add_argument("--prices", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle", help="exact optimum of a tiny instance")
    p.add_argument("--input", required=True)
    p.add_argument("--max-edges", type=int, default=8)
    p.add_argument("--max-customers", type=int, default=8)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="run an experiment configuration")
    p.add_argument("--config", required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValidationError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return 0


if __name__ == "__main__":
    sys.exit(main())
