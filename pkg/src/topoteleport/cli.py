"""Command line entry point.

Exit codes: 0 success, 1 config error, 2 rows carrying evaluation errors,
3 validation-suite failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .figures import FIGURES, UnknownFigureError, reproduce_figure
from .sweep import PARAMETERS, ConfigError, SweepConfig, load_config, run_sweep, write_csv, write_json

EXIT_OK, EXIT_CONFIG, EXIT_ROWS, EXIT_VALIDATION = 0, 1, 2, 3
SEED_ENV = "TOPOTELEPORT_SEED"
DYNAMICS_OUTPUTS = ("alpha1", "alpha2", "f_avg", "fidelity", "concurrence_out", "qfi")

log = logging.getLogger("topoteleport")


def _parse_sets(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"expected key=value, got {item!r}", key="--set", source="<command line>")
        k, v = (s.strip() for s in item.split("=", 1))
        if k not in PARAMETERS and k != "t":
            raise ConfigError("unknown parameter", key=k, source="<command line>")
        try:
            out[k] = float(v)
        except ValueError:
            raise ConfigError(f"expected a number, got {v!r}", key=k, source="<command line>") from None
    return out


def _emit(cfg: SweepConfig, out_dir: Path, stem: str, fmt: str, threads: int,
          meta: Optional[dict] = None) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{stem}.{fmt}"
    writer = write_csv if fmt == "csv" else write_json
    with open(path, "w", encoding="utf-8", newline="") as fh:
        errors = writer(run_sweep(cfg, threads=threads), cfg, fh, meta=meta)
    log.info("wrote %s", path)
    return errors


def _cmd_dynamics(args) -> int:
    cfg = load_config(args.config) if args.config else SweepConfig(outputs=DYNAMICS_OUTPUTS)
    if cfg.swept:
        raise ConfigError("dynamics takes a single trajectory; use 'sweep' for swept axes",
                          key="sweep", source=args.config or "<config>")
    overrides = _parse_sets(args.set)
    if "t" in overrides:
        t = overrides.pop("t")
        cfg.time_grid = (t, t, 1)
    cfg.fixed.update(overrides)
    cfg.validate()
    return _emit(cfg, Path(args.out), "dynamics", args.format, args.threads)


def _cmd_sweep(args) -> int:
    if not args.config:
        raise ConfigError("sweep needs --config", key="--config", source="<command line>")
    cfg = load_config(args.config)
    return _emit(cfg, Path(args.out), Path(args.config).stem, args.format, args.threads)


def _cmd_figure(args) -> int:
    paths, errors = reproduce_figure(args.name, _parse_sets(args.set), args.out,
                                     threads=args.threads, fmt=args.format)
    for p in paths:
        log.info("wrote %s", p)
    return errors


def _cmd_validate(args) -> int:
    import pytest

    tests = Path(args.tests) if args.tests else Path(__file__).resolve().parents[2] / "tests"
    if not tests.is_dir():
        log.error("test directory %s not found; pass --tests", tests)
        return EXIT_VALIDATION
    argv = [str(tests), "-q"]
    if args.seed is not None:
        os.environ[SEED_ENV] = str(args.seed)
        argv.append(f"--hypothesis-seed={args.seed}")
    return EXIT_OK if pytest.main(argv) == 0 else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key-value config file")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, help="seed for the randomized property suites")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a parameter (or t); repeatable")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="topoteleport", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("dynamics", parents=[common], help="single trajectory over the time grid")
    sub.add_parser("sweep", parents=[common], help="parameter sweep from --config")
    fig = sub.add_parser("figure", parents=[common], help="reproduce the data of one figure")
    fig.add_argument("name", help=", ".join(FIGURES))
    val = sub.add_parser("validate", parents=[common], help="run the oracle and property suite")
    val.add_argument("--tests", help="test directory (default: the repository's tests/)")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; here 2 means flagged rows
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    handler = {"dynamics": _cmd_dynamics, "sweep": _cmd_sweep,
               "figure": _cmd_figure, "validate": _cmd_validate}[args.command]
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = handler(args)
    except (ConfigError, UnknownFigureError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, UnknownFigureError) else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate":
        return result
    if result:
        print(f"warning: {result} row(s) carry evaluation errors", file=sys.stderr)
        return EXIT_ROWS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
