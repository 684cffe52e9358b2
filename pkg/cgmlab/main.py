"""Command-line interface: `cgmlab verify` runs a scenario, `cgmlab table` writes the curvature table."""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from typing import Iterator, List, Optional, TextIO

from pydantic import ValidationError

from cgmlab import __version__
from cgmlab.config import DEFAULT_FD_STEP, DEFAULT_SEED, EXIT_FAILED, EXIT_PASSED, EXIT_USAGE
from cgmlab.errors import CgmlabError, DomainError
from cgmlab.scenarios import run_scenario
from cgmlab.schemas import PlaneKind, ScenarioConfig, ScenarioName, TableConfig
from cgmlab.table import emit_table, write_table

logger = logging.getLogger("cgmlab")

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


# -------- Logging setup --------

def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


# -------- Parser --------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    noise = common.add_mutually_exclusive_group()
    noise.add_argument("-v", "--verbose", action="store_true", help="log per-sample detail")
    noise.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")
    common.add_argument("--out", default="-", help="output path, '-' for stdout (default)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--fd-step", type=float, default=DEFAULT_FD_STEP, dest="fd_step")

    parser = argparse.ArgumentParser(
        prog="cgmlab",
        description="Verify Cheeger-Gromoll metric and Hopf map identities numerically.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", parents=[common], help="run one scenario and emit a JSON report")
    verify.add_argument("--scenario", required=True, choices=[s.value for s in ScenarioName])
    verify.add_argument("--c", type=float, required=True)
    verify.add_argument("--m", type=float, default=None)
    verify.add_argument("--r", type=float, default=0.0)
    verify.add_argument("--epsilon", type=float, default=None)
    verify.add_argument("--samples", type=int, default=None)
    verify.add_argument(
        "--oracle-samples",
        type=int,
        default=None,
        dest="oracle_samples",
        help="points for the finite-difference curvature checks (default: --samples)",
    )
    verify.add_argument("--tol", type=float, default=None)

    table = sub.add_parser("table", parents=[common], help="write lift-plane sectional curvatures as CSV")
    table.add_argument("--c-list", type=float, nargs="+", required=True, dest="c_list")
    table.add_argument("--m-list", type=float, nargs="+", required=True, dest="m_list")
    table.add_argument("--r-list", type=float, nargs="+", required=True, dest="r_list")
    table.add_argument("--planes", nargs="+", choices=[p.value for p in PlaneKind], default=None)
    return parser


@contextlib.contextmanager
def _output(path: str) -> Iterator[TextIO]:
    if path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as handle:
        yield handle


# -------- Commands --------

def _verify(args: argparse.Namespace) -> int:
    try:
        cfg = ScenarioConfig(
            scenario=args.scenario,
            c=args.c,
            m=args.m,
            r=args.r,
            epsilon=args.epsilon,
            samples=args.samples,
            oracle_samples=args.oracle_samples,
            seed=args.seed,
            tol=args.tol,
            fd_step=args.fd_step,
        )
    except ValidationError as exc:
        logger.error("INVALID CONFIG: %s", exc)
        return EXIT_USAGE

    try:
        report = run_scenario(cfg)
    except DomainError as exc:
        logger.error("VERIFY ERROR: %s", exc)
        return EXIT_FAILED
    except CgmlabError as exc:
        logger.error("INVALID SCENARIO PARAMETERS: %s", exc)
        return EXIT_USAGE

    try:
        with _output(args.out) as out:
            json.dump(report.model_dump(mode="json"), out, indent=2, allow_nan=False)
            out.write("\n")
    except OSError as exc:
        logger.error("REPORT WRITE ERROR: %s", exc)
        return EXIT_FAILED

    return EXIT_PASSED if report.passed else EXIT_FAILED


def _table(args: argparse.Namespace) -> int:
    try:
        cfg = TableConfig(
            c_list=args.c_list,
            m_list=args.m_list,
            r_list=args.r_list,
            planes=args.planes if args.planes else list(PlaneKind),
            seed=args.seed,
            fd_step=args.fd_step,
        )
    except ValidationError as exc:
        logger.error("INVALID CONFIG: %s", exc)
        return EXIT_USAGE

    try:
        rows = emit_table(cfg)
    except CgmlabError as exc:
        logger.error("TABLE ERROR: %s", exc)
        return EXIT_FAILED

    try:
        with _output(args.out) as out:
            write_table(rows, out)
    except OSError as exc:
        logger.error("TABLE WRITE ERROR: %s", exc)
        return EXIT_FAILED
    return EXIT_PASSED


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASSED

    configure_logging(verbose=args.verbose, quiet=args.quiet)
    if args.command == "verify":
        return _verify(args)
    return _table(args)


if __name__ == "__main__":
    sys.exit(main())
