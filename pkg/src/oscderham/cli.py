"""Command line entry point: ``oscderham run | dump | list``.

Exit codes: 0 pass, 1 check failure, 2 config or usage error, 3 indeterminate rank.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import matrixio
from .experiments import ConfigError, ExperimentConfig, build_assembly, list_experiments, run

log = logging.getLogger("oscderham")


def _load_config(args) -> ExperimentConfig:
    try:
        payload = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    if getattr(args, "seed", None) is not None:
        payload["seed"] = args.seed
    if getattr(args, "tol", None) is not None:
        payload.setdefault("tolerances", {})["residual"] = args.tol
    return ExperimentConfig.from_dict(payload)


def cmd_run(args) -> int:
    cfg = _load_config(args)
    report = run(cfg)
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    for e in report.entries:
        log.info("%-4s %-28s value=%s tol=%s", e.status.upper(), e.name, e.value, e.tolerance)
    log.info("%s: %s (%.2fs)", cfg.experiment, report.status, report.duration_s)
    return report.exit_code


def cmd_dump(args) -> int:
    cfg = _load_config(args)
    asm = build_assembly(cfg)
    try:
        matrix = asm.matrix(args.matrix, args.degree)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from exc
    matrixio.dump_matrix(matrix, args.out)
    log.info("wrote %s degree %d (%dx%d) to %s", args.matrix, args.degree, *matrix.shape, args.out)
    return 0


def cmd_list(args) -> int:
    for item in list_experiments():
        print(f"{item['name']:<11} {item['description']}  [{item['anchor']}]")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oscderham", description=__doc__.splitlines()[0])
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress the per-check summary on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--tol", type=float, help="override the relative residual tolerance")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("dump", help="write an assembled matrix as JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--matrix", choices=("d", "adjoint", "laplacian"), default="laplacian")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dump)

    p = sub.add_parser("list", help="list the available experiments")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return 2
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
