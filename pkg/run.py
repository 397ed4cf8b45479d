#!/usr/bin/env python3
"""CLI entry point for the AIM coupled-cluster Green's function toolkit."""

import argparse
import logging
import sys
from typing import List, Optional

from src.pipeline.runner import EXIT_CONFIG, run_pipeline
from src.utils.exceptions import ConfigError
from src.utils.helpers import setup_logging
from src.utils.run_config import load_run_config


def parse_args(argv: Optional[List[str]] = None):
    """Parse command line arguments."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", "-c",
        type=str,
        help="Path to a YAML config merged over config/config.yaml"
    )
    common.add_argument(
        "--out", "-o",
        type=str,
        help="Output directory (overrides output.dir)"
    )
    common.add_argument(
        "--seed",
        type=int,
        help="Sampling seed (overrides measurement.seed)"
    )
    common.add_argument(
        "--shots",
        type=int,
        help="Shots per circuit; 0 gives the infinite-shot limit"
    )
    common.add_argument(
        "--mode",
        choices=["exact", "hadamard", "lcu"],
        help="Measurement mode (overrides measurement.mode)"
    )
    common.add_argument(
        "--format",
        choices=["csv", "json"],
        help="Artifact format (overrides output.format)"
    )
    common.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Enable verbose logging"
    )

    parser = argparse.ArgumentParser(
        description="Hybrid coupled-cluster Green's functions for the Anderson impurity model"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("solve-cc", parents=[common], help="Solve the T and Lambda amplitude equations")

    greens = subparsers.add_parser("greens", parents=[common], help="Time-domain Green's function G(t)")
    greens.add_argument(
        "--dump-lcu",
        action="store_true",
        help="Also write the unitary expansions of both parts"
    )
    greens.add_argument(
        "--t1-only",
        action="store_true",
        help="Keep only impurity single excitations in the expansion"
    )

    subparsers.add_parser("spectrum", parents=[common], help="Spectral function A(omega) and a gnuplot script")
    subparsers.add_parser("resources", parents=[common], help="Asymptotic resource estimates")
    validate = subparsers.add_parser("validate", parents=[common], help="Compare against exact diagonalization")
    validate.add_argument(
        "--threshold",
        type=float,
        help="Maximum allowed |G_hybrid - G_ED| (overrides validate.threshold)"
    )
    subparsers.add_parser("trotter-ratio", parents=[common], help="Trotter error bounds against the actual error")

    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    args = parse_args(argv)

    # Set up logging early so config errors are reported
    logger = setup_logging("DEBUG" if args.verbose else "INFO")

    try:
        config = load_run_config(
            args.config,
            seed=args.seed,
            shots=args.shots,
            mode=args.mode,
            out=args.out,
            format=args.format,
            threshold=getattr(args, "threshold", None),
        )
    except (ConfigError, FileNotFoundError) as e:
        logger.error(str(e))
        return EXIT_CONFIG

    if not args.verbose:
        logger = setup_logging(config.logging.level, config.logging.format, config.logging.file)
    logging.getLogger(__name__).debug(f"Configuration hash {config.hash}")

    return run_pipeline(
        config,
        args.command,
        dump_lcu=getattr(args, "dump_lcu", False),
        t1_only=getattr(args, "t1_only", False),
    )


if __name__ == "__main__":
    sys.exit(main())
