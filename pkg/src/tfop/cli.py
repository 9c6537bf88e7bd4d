"""Command-line entry point.

Exit codes: 0 pass, 1 configuration error, 2 numerical failure (NaN,
degenerate phase, fitness), 3 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from typing import Any, Sequence

from .config import ExperimentConfig, load_config
from .errors import ConfigError, FitnessError, NumericalFailure, TfopError
from .harness import (
    bundled_config,
    run_bound_experiment,
    run_experiment,
    run_norm_audits,
    run_schatten_experiment,
    run_verification_suite,
    schatten_records,
    summarize,
)
from .report import CheckRecord, emit_report

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3

DEFAULT_CONFIGS = {
    "verify": "default_verify",
    "bound": "reference_bound",
    "schatten": "schatten_decay",
    "norms": "norm_audits",
    "report": "default_verify",
}


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from exc
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tfop", description="Time-frequency operator experiments and identity checks.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="increase logging verbosity")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "verify": "run the identity verification suite",
        "bound": "bound-ratio report for the configured operator",
        "schatten": "Schatten norms over a family of localized amplitudes",
        "norms": "modulation, patch and amplitude norm audits",
        "report": "run the experiment named in the config and write its report",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="JSON configuration file (defaults to the bundled one)")
        p.add_argument("--out", help="output directory (overrides the config)")
        p.add_argument("--seed", type=_seed, help="random seed (overrides the config)")
        p.add_argument("--format", choices=("json", "csv"), action="append", help="report format; repeat for several")
    return parser


def _load(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else bundled_config(DEFAULT_CONFIGS[args.command])
    cfg = cfg.with_seed(args.seed)
    if args.out or args.format:
        out = dataclasses.replace(
            cfg.output,
            directory=args.out or cfg.output.directory,
            formats=tuple(args.format) if args.format else cfg.output.formats,
        )
        cfg = dataclasses.replace(cfg, output=out)
    return cfg


def _emit(cfg: ExperimentConfig, records: Sequence[CheckRecord], body: dict[str, Any] | None, stem: str) -> None:
    echo = cfg.to_dict()
    for fmt in cfg.output.formats:
        if body is None:
            emit_report(records, fmt, cfg.output.directory, stem, config=echo)
        else:
            doc = dict(body)
            if records:
                doc["records"] = [r.as_dict() for r in records]
            emit_report(doc, fmt, cfg.output.directory, stem, config=echo)


def _print_records(records: Sequence[CheckRecord]) -> None:
    for r in records:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: {r.value:.3e} (tolerance {r.tolerance:.1e})")


def _dispatch(args: argparse.Namespace) -> int:
    cfg = _load(args)
    cmd = args.command
    records: list[CheckRecord]
    body: dict[str, Any] | None
    if cmd == "verify":
        records, body = run_verification_suite(cfg), None
    elif cmd == "bound":
        rep = run_bound_experiment(cfg)
        records, body = [], {"experiment": "bound_2_7", **rep.as_dict()}
        print(f"ratio {rep.ratio:.17g} (lhs {rep.lhs:.6g}, d {rep.d:.6g}, amplitude {rep.amp_norm:.6g}, phase {rep.phase_norm:.6g})")
    elif cmd == "schatten":
        body = run_schatten_experiment(cfg)
        records = schatten_records(body)
    elif cmd == "norms":
        records, body = [], run_norm_audits(cfg)
    else:
        records, body = run_experiment(cfg)
    _print_records(records)
    _emit(cfg, records, body, cmd if cmd != "report" else cfg.experiment)
    summary = summarize(records)
    if records:
        print(f"{summary['passed']}/{summary['checks']} checks passed")
    return EXIT_VERIFY if summary["failed"] else EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which would read as a numerical failure
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, FitnessError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except TfopError as exc:
        # remaining library errors stem from inputs the configuration produced
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
