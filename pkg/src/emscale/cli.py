"""Command-line entry point.

    emscale run [--config PATH] [--cycle PATH] [--mode both] [--iters 50] [--seed 1,2,3] ...
    emscale validate PATH

Exit codes: 0 ok, 2 config error, 3 infeasible run, 4 IO error.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, _seeds, load_config, validate_config
from .cycle import CycleError

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_IO = 0, 2, 3, 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emscale", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="optimize designs and write a study directory")
    run.add_argument("--config", help="flat key=value config file")
    run.add_argument("--cycle", help="two-column time,speed file (default: bundled WLTC class 3b)")
    run.add_argument("--speed-unit", choices=("kmh", "ms"))
    run.add_argument("--mode", choices=("proportional", "combined", "both"))
    run.add_argument("--iters", type=int)
    run.add_argument("--seed", help="seed or comma-separated seeds")
    run.add_argument("--dt", type=float, help="resampling step, s")
    run.add_argument("--out", help="output directory")
    run.add_argument("--trace", action="store_true", default=None, help="write a per-step trace for every evaluation")
    run.add_argument("--jobs", type=int, help="run seeds/modes in N processes")

    val = sub.add_parser("validate", help="check a config file")
    val.add_argument("path")
    return parser


def _cmd_validate(args) -> int:
    try:
        report = validate_config(args.path)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for line in report.lines():
        print(line)
    if report.clean:
        print("ok")
        return EXIT_OK
    return EXIT_CONFIG


def _cmd_run(args) -> int:
    from .study import run_study

    try:
        cfg = load_config(args.config)
        cfg = cfg.with_overrides(**{
            "run.cycle": args.cycle,
            "run.speed_unit": args.speed_unit,
            "run.mode": args.mode,
            "run.iters": args.iters,
            "run.seeds": _seeds(args.seed) if args.seed else None,
            "run.dt": args.dt,
            "run.out": args.out,
            "run.trace": args.trace,
            "run.jobs": args.jobs,
        })
        if cfg["run.iters"] < 1 or cfg["run.dt"] <= 0 or cfg["run.jobs"] < 1:
            raise ConfigError("run", "iters and jobs must be >= 1, dt must be positive")
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        study = run_study(cfg)
    except CycleError as exc:
        print(f"cycle error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO

    print((study.out / "summary.txt").read_text(encoding="utf-8"), end="")
    if study.infeasible_runs:
        for mode, seed in study.infeasible_runs:
            print(f"infeasible run: {mode} seed {seed}; see {study.out / f'{mode}-seed{seed}' / 'trace.csv'}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "validate":
        return _cmd_validate(args)
    return _cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
