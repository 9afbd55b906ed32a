"""Command-line driver: run, validate, calibrate, suite.

Exit codes: 0 success, 1 validation failure, 2 runtime error.  Worker count
comes from --threads or the RMDYN_THREADS environment variable; outputs are
identical at any worker count because every trial owns a derived stream.
"""

from __future__ import annotations

import argparse
import multiprocessing
import os
import sys

from .config import RunConfig, parse_config
from .errors import ConfigurationError, RmdynError
from .plots import emit_plots
from .records import write_record
from .runner import resolve_scale, run_from_config
from .suites import decomposition_suite, geometry_suite

__all__ = ["main", "cli_main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmdyn",
        description="Stochastic unitary measurement dynamics: reproducible desk-scale experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute the experiment described by a config file")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int, default=None, help="override experiment.seed")
    run.add_argument("--trials", type=int, default=None, help="override experiment.trials")
    run.add_argument("--out", default=None, help="override output.dir")
    run.add_argument("--threads", type=int, default=None, help="worker count (default RMDYN_THREADS or 1)")

    val = sub.add_parser("validate", help="parse and validate a config file")
    val.add_argument("--config", required=True)

    cal = sub.add_parser("calibrate", help="calibrate the ensemble scale for a config")
    cal.add_argument("--config", required=True)

    suite = sub.add_parser("suite", help="run a deterministic invariant suite")
    suite.add_argument("name", choices=["geometry", "decomposition"])
    return parser


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        cfg.sections["experiment"]["seed"] = args.seed
    if args.trials is not None:
        cfg.sections["experiment"]["trials"] = args.trials
    if args.out is not None:
        cfg.sections["output"]["dir"] = args.out
    return cfg


def _thread_count(args) -> int:
    if getattr(args, "threads", None) is not None:
        return max(1, args.threads)
    env = os.environ.get("RMDYN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            return 1
    return 1


def cli_main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "suite":
        fn = geometry_suite if args.name == "geometry" else decomposition_suite
        ok, lines, _ = fn()
        for line in lines:
            print(line)
        return 0 if ok else 1

    try:
        cfg = parse_config(args.config)
    except (ConfigurationError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    if args.command == "validate":
        print(f"ok: {cfg.kind}")
        return 0

    if args.command == "calibrate":
        try:
            scale = resolve_scale(cfg)
        except RmdynError as exc:
            print(f"calibration error: {exc}", file=sys.stderr)
            return 2
        print(f"{scale:.10e}")
        return 0

    # run
    cfg = _apply_overrides(cfg, args)
    threads = _thread_count(args)
    out_dir = cfg.get("output", "dir")
    pool = None
    try:
        if threads > 1 and cfg.kind in ("zeno", "product_form"):
            pool = multiprocessing.Pool(processes=threads)
        record = run_from_config(cfg, pool=pool)
    except RmdynError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    paths = write_record(record, out_dir, cfg)
    emit_plots(record, out_dir)
    for warning in record.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(paths["summary"])
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
