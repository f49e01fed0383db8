"""
group-phi generate-config command

Writes the default run configuration as a commented ``key=value`` file.
"""

from __future__ import annotations

import argparse
import errno
import logging
from pathlib import Path

from ..config.run_config import RunConfigManager
from . import common

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT = "group_phi.conf"


def add_parser(subparsers: common.SubParsers) -> argparse.ArgumentParser:
    """Add generate-config command parser."""
    parser: argparse.ArgumentParser = subparsers.add_parser(
        "generate-config",
        help="Write a configuration template",
        description=(
            "Write every run parameter with its default value as a flat "
            "key=value file, to be edited and passed back with --config."
        ),
    )
    parser.add_argument(
        "--output",
        "-o",
        default=DEFAULT_OUTPUT,
        help=f"Output file (default: {DEFAULT_OUTPUT})",
    )
    parser.add_argument(
        "--force", action="store_true", help="Overwrite an existing configuration file"
    )
    parser.add_argument("--verbose", "-v", action="store_true", help=argparse.SUPPRESS)
    parser.add_argument("--quiet", "-q", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(args: argparse.Namespace) -> int:
    """Generate-config command entry point.

    Args:
        args: Parsed command line arguments.

    Returns:
        Exit code.
    """
    output = Path(args.output)
    if output.exists() and not args.force:
        raise FileExistsError(
            errno.EEXIST, "File exists; use --force to overwrite it", str(output)
        )
    output.parent.mkdir(parents=True, exist_ok=True)
    RunConfigManager().save_default_config(output)
    logger.info(f"Use it with: group-phi <command> ... --config {output}")
    return common.EXIT_OK
