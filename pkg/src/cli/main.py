"""argparse front end: `slr phantom|mask|recover|sweep`."""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import structlog

from config.logging import configure_logging
from config.settings import settings
from ..errors import SlrError
from .runner import cmd_mask, cmd_phantom, cmd_recover, cmd_sweep, parse_lambdas

logger = structlog.get_logger()

EXIT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per operation."""
    parser = argparse.ArgumentParser(
        prog="slr",
        description="Two-component structured low-rank recovery from undersampled k-space",
    )
    parser.add_argument(
        "--log-level",
        type=str,
        default=settings.log_level,
        help="Log level (DEBUG, INFO, WARNING, ...)",
    )
    parser.add_argument(
        "--log-format",
        choices=["console", "json"],
        default=settings.log_format,
        help="Log renderer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    phantom = sub.add_parser("phantom", help="Write a phantom and its components")
    phantom.add_argument("spec", type=Path, help="Phantom spec JSON")
    phantom.add_argument("--output-dir", type=Path, default=None)

    mask = sub.add_parser("mask", help="Write a variable-density sampling mask")
    mask.add_argument("spec", type=Path, help="Mask spec JSON")
    mask.add_argument("--output-dir", type=Path, default=None)

    recover = sub.add_parser("recover", help="Run recovery for every mode of a run file")
    recover.add_argument("run", type=Path, help="Run config JSON")
    recover.add_argument("--output-dir", type=Path, default=None)

    sweep = sub.add_parser("sweep", help="Grid-search lambda1 / lambda2 against ground truth")
    sweep.add_argument("run", type=Path, help="Run config JSON")
    sweep.add_argument("--lambda1", type=str, required=True, help="Comma-separated lambda1 values")
    sweep.add_argument("--lambda2", type=str, required=True, help="Comma-separated lambda2 values")
    sweep.add_argument(
        "--workers",
        type=int,
        default=settings.sweep_workers,
        help="Concurrent solves (default: SLR_SWEEP_WORKERS)",
    )
    sweep.add_argument("--output-dir", type=Path, default=None)

    return parser


def run_command(args: argparse.Namespace) -> None:
    if args.command == "phantom":
        cmd_phantom(args.spec, args.output_dir)
    elif args.command == "mask":
        cmd_mask(args.spec, args.output_dir)
    elif args.command == "recover":
        cmd_recover(args.run, args.output_dir)
    elif args.command == "sweep":
        cmd_sweep(
            args.run,
            parse_lambdas(args.lambda1),
            parse_lambdas(args.lambda2),
            workers=args.workers,
            output_dir=args.output_dir,
        )


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and run one command.

    Returns:
        0 on success, 2 on any recovery error (message on stderr)
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, args.log_format)
    try:
        run_command(args)
    except SlrError as e:
        iteration = getattr(e, "iteration", None)
        logger.error("Command failed", command=args.command, error=str(e), iteration=iteration)
        print(f"slr {args.command}: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    return 0
