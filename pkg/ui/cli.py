# ui/cli.py
"""
Command-line front-end.

    python -m ui.cli factor N [--b-max U] [--trials T] [--seed S] [--c R] [--workers W] [--json PATH]
    python -m ui.cli order N --b1 V --b2 V --x V --y V --b B [--form root|weierstrass]
    python -m ui.cli demo
    python -m ui.cli classify N --p P --q Q --b1 V --b2 V --x V --y V --b B
    python -m ui.cli smooth-lab --x 10000,100000 --alpha 0.7071 --beta 3/4 [--theta-grid 0,1,2] [--csv PATH]

Exit codes: 0 success, 1 demo mismatch, 2 budget exhausted, 64 bad input.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, List, Optional

from core.bigmod import SemiprimeContext
from core.multiplier import HasseWindow, NonSeparating, Separated, staged_multiply
from core.smoothlab import conjecture_table, write_csv
from core.version import DISPLAY_NAME
from infra.config import env_workers, load_config_file, merge_overrides, parse_int, parse_int_list, parse_rational
from infra.logging import enable_console, get_logger, log_worker_event
from infra.paths import get_runs_dir
from services.pipeline import (
    PipelineConfig,
    build_pair,
    classify_pair,
    demo_example,
    run_algorithm_a,
)
from ui.constants import CLI_DEMO_BAD, CLI_DEMO_OK, CLI_DESCRIPTION, CLI_EXHAUSTED

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_EXHAUSTED = 2
EXIT_BAD_INPUT = 64


def _add_pair_args(p: argparse.ArgumentParser) -> None:
    for name in ("--b1", "--b2", "--x", "--y"):
        p.add_argument(name, required=True, type=parse_int)
    p.add_argument("--b", required=True, type=parse_int, help="prime bound B")
    p.add_argument("--form", choices=("root", "weierstrass"), default="root",
                   help="read (b1, b2) as roots or as Weierstrass coefficients")
    p.add_argument("--c", type=parse_rational, default=None, help="Hasse window scale")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ec2factor", description=CLI_DESCRIPTION)
    ap.add_argument("--version", action="version", version=DISPLAY_NAME)
    ap.add_argument("--verbose", action="store_true", help="mirror the log to stderr")
    ap.add_argument("--config", type=Path, default=None, help="JSON file with pipeline settings")
    sub = ap.add_subparsers(dest="command", required=True)

    f = sub.add_parser("factor", help="run the factoring loop")
    f.add_argument("N", type=parse_int)
    f.add_argument("--b-max", type=parse_int, default=None)
    f.add_argument("--trials", type=parse_int, default=None)
    f.add_argument("--seed", type=parse_int, default=None)
    f.add_argument("--c", type=parse_rational, default=None)
    f.add_argument("--workers", type=parse_int, default=None)
    f.add_argument("--json", type=Path, default=None, help="JSON-lines trial log (default: runs folder)")

    o = sub.add_parser("order", help="t_min and the common order d of one pair")
    o.add_argument("N", type=parse_int)
    _add_pair_args(o)

    sub.add_parser("demo", help="replay Example 1")

    c = sub.add_parser("classify", help="oracle-mode B-decomposition clause of one pair")
    c.add_argument("N", type=parse_int)
    c.add_argument("--p", required=True, type=parse_int)
    c.add_argument("--q", required=True, type=parse_int)
    _add_pair_args(c)

    s = sub.add_parser("smooth-lab", help="smooth-part statistics table")
    s.add_argument("--x", required=True, type=parse_int_list)
    s.add_argument("--alpha", required=True, type=parse_rational)
    s.add_argument("--beta", required=True, type=parse_rational)
    s.add_argument("--theta-grid", default="0")
    s.add_argument("--width", choices=("conjecture", "hasse"), default="conjecture")
    s.add_argument("--workers", type=parse_int, default=None, help="sieve processes")
    s.add_argument("--csv", type=Path, default=None, help="CSV table (default: runs folder)")
    return ap


def _config(args: argparse.Namespace, **flags: Any) -> PipelineConfig:
    """Defaults < EC2FACTOR_WORKERS < --config file < command-line flags."""
    settings = merge_overrides({}, {"workers": env_workers(None)})
    if args.config:
        settings = merge_overrides(settings, load_config_file(args.config))
    return PipelineConfig.from_mapping(merge_overrides(settings, flags))


def cmd_factor(args: argparse.Namespace) -> int:
    cfg = _config(args, trial_budget=args.trials, seed=args.seed, hasse_scale_c=args.c, workers=args.workers)
    report = run_algorithm_a(args.N, cfg, b_max=args.b_max)
    out = args.json or get_runs_dir() / f"factor_{args.N}_seed{cfg.seed}.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json_lines(), encoding="utf-8")
    log_worker_event("CLI", "wrote", str(out))
    if report.factored:
        print(f"{report.p} {report.q}")
        print(json.dumps(report.summary()), file=sys.stderr)
        return EXIT_OK
    print(CLI_EXHAUSTED.format(trials=len(report.records), counts=report.counts))
    return EXIT_EXHAUSTED


def cmd_order(args: argparse.Namespace) -> int:
    ctx = SemiprimeContext(args.N, hasse_scale_c=args.c if args.c is not None else 1)
    curve, Q = build_pair(ctx.N, args.b1, args.b2, args.x, args.y, args.form)
    rep = staged_multiply(curve, Q, args.b, HasseWindow.from_context(ctx))
    if isinstance(rep, Separated):
        print(f"t_min={rep.t_min} factor={rep.g}")
    elif isinstance(rep, NonSeparating):
        order = " * ".join(f"{l}^{e}" for l, e in rep.order)
        print(f"t_min={rep.t_min} d={rep.d} ({order})")
    else:
        print(f"still finite after all primes <= {rep.t_max}")
    return EXIT_OK


def cmd_demo(_args: argparse.Namespace) -> int:
    transcript = demo_example(strict=False)
    for line in transcript.lines():
        print(line)
    if not transcript.ok:
        print(CLI_DEMO_BAD)
        return EXIT_MISMATCH
    print(CLI_DEMO_OK.format(ms=transcript.ms))
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    ctx = SemiprimeContext(args.N, hasse_scale_c=args.c if args.c is not None else 1, oracle=(args.p, args.q))
    curve, Q = build_pair(ctx.N, args.b1, args.b2, args.x, args.y, args.form)
    cls = classify_pair(curve, Q, args.b, ctx)
    print(f"clause: {cls.clause or 'none'}")
    for name in ("t_min", "l_min", "order_p", "order_q", "trace_p", "trace_q",
                 "largest_prime_p", "largest_prime_q", "corollary_p", "corollary_q"):
        print(f"{name}: {getattr(cls, name)}")
    return EXIT_OK


def cmd_smooth_lab(args: argparse.Namespace) -> int:
    thetas = [parse_rational(t) for t in str(args.theta_grid).split(",") if t.strip()]
    workers = args.workers if args.workers is not None else env_workers(1)
    table = conjecture_table(args.x, float(args.alpha), args.beta, thetas, args.width, workers=workers)
    for r in table.rows:
        row = r.as_csv_row()
        print(" ".join(f"{k}={row[k]}" for k in row))
    print(f"least theta: {table.least_theta}  greatest passing theta: {table.greatest_passing_theta}")
    out = args.csv or get_runs_dir() / "smooth_lab.csv"
    write_csv(table.rows, out)
    log_worker_event("CLI", "wrote", str(out))
    return EXIT_OK


COMMANDS = {
    "factor": cmd_factor,
    "order": cmd_order,
    "demo": cmd_demo,
    "classify": cmd_classify,
    "smooth-lab": cmd_smooth_lab,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_BAD_INPUT
    get_logger()
    if args.verbose:
        enable_console(logging.DEBUG)
    try:
        code = COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError) as e:
        log_worker_event("CLI", "error", f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    log_worker_event("CLI", "finished", f"{args.command} exit {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
