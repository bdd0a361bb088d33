"""Command-line entry point for the verification experiments.

Exit codes: 0 success, 1 parameter or precondition error, 2 one of the
command's built-in checks failed, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import time

from ..errors import DomainError, ParameterError, ResourceLimitError
from . import experiments
from .records import RunConfig, write_records

COMMANDS = {
    "verify-bessel-bound": experiments.run_verify_bessel_bound,
    "verify-ball-volume": experiments.run_verify_ball_volume,
    "modulus": experiments.run_modulus,
    "reroot-test": experiments.run_reroot_test,
    "estimate-kappa": experiments.run_estimate_kappa,
    "build-disk": experiments.run_build_disk,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="browniandisk",
        description=(
            "Monte Carlo verification of boundary geometry statistics for "
            "random disk-like surfaces"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=str, default=None, help="INI config file")
        p.add_argument("--seed", type=int, default=None, help="global seed override")
        p.add_argument(
            "--replicas", type=int, default=None, help="replica count override"
        )
        p.add_argument("--threads", type=int, default=None, help="worker threads")
        p.add_argument("--out", type=str, default=None, help="output directory")
    return parser


def run_command(name: str, config: RunConfig) -> int:
    runner = COMMANDS[name]
    cfg = config.section(name)
    start = time.perf_counter()
    if name == "build-disk":
        records, checks = runner(
            cfg, config.seed, config.threads, out_dir=config.out_dir
        )
    else:
        records, checks = runner(cfg, config.seed, config.threads)
    wall = time.perf_counter() - start
    csv_path = write_records(config.out_dir, name, records, checks, config, wall)
    for rec in records:
        print(
            f"[ROW] {rec.statistic} {rec.params} -> {rec.estimate:.6g}"
            + (f" +- {rec.stderr:.2g}" if rec.stderr else "")
        )
    failed = 0
    for chk in checks:
        tag = "PASS" if chk.passed else "FAIL"
        print(f"[CHECK {tag}] {chk.name}: {chk.detail}")
        failed += not chk.passed
    print(f"[DONE] {name}: {len(records)} rows -> {csv_path} ({wall:.1f}s)")
    return 2 if failed else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = (
            RunConfig.from_file(args.config) if args.config else RunConfig()
        )
        config.override(
            "run",
            seed=args.seed,
            replicas=args.replicas,
            threads=args.threads,
            out=args.out,
        )
        return run_command(args.command, config)
    except (ParameterError, DomainError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
