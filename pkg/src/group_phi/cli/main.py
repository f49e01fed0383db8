#!/usr/bin/env python3
"""
group-phi CLI Main Entry Point

Command-line interface for group-phi: integrated information of groups
from their interaction logs.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .. import __version__
from . import common, encode, generate_config, phi, pipeline, sample, stats, sweep


def create_parser() -> argparse.ArgumentParser:
    """Create the main argument parser with subcommands.

    Returns:
        Configured ArgumentParser with all subcommands.
    """
    parser: argparse.ArgumentParser = argparse.ArgumentParser(
        prog="group-phi",
        description="group-phi: integrated information (phi) of human and machine groups",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Encode logs as state matrices
  group-phi encode turns --input volumes.csv --threshold 0.5 --output group1.csv
  group-phi encode chat --input chat.csv --output chat.csv
  group-phi encode edits --input edits.csv --output windows/

  # Phi of one state matrix
  group-phi phi empirical --input group1.csv --tau 10

  # Sweeps and node samples
  group-phi sweep tau --input group*.csv --taus 1-30 --output sweep/
  group-phi sample --input packets.csv --goal 100 --replicates 100 --output samples/

  # Statistics over a table
  group-phi stats tau --input windows.csv --x phi --y new_quality

  # Complete studies
  group-phi pipeline study3 --input captures/*.csv --seed 7 --output study3/

  # Generate a configuration template
  group-phi generate-config --output group_phi.conf

Exit status:
  0 success, 1 computation error, 2 input/output error, 130 interrupted.
  Errors are reported on stderr as one JSON object.

For more help on a specific command:
  group-phi <command> --help
        """,
    )

    parser.add_argument("--version", action="version", version=f"group-phi {__version__}")

    subparsers: common.SubParsers = parser.add_subparsers(
        dest="command", help="Available commands", metavar="COMMAND"
    )

    # Add subcommand parsers
    encode.add_parser(subparsers)
    phi.add_parser(subparsers)
    sample.add_parser(subparsers)
    sweep.add_parser(subparsers)
    stats.add_parser(subparsers)
    pipeline.add_parser(subparsers)
    generate_config.add_parser(subparsers)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Main CLI entry point.

    Args:
        argv: Optional command line arguments.

    Returns:
        Exit code (0 for success, non-zero for failure).
    """
    parser: argparse.ArgumentParser = create_parser()
    args: argparse.Namespace = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return common.EXIT_COMPUTATION

    common.configure_logging(args)

    try:
        # Route to appropriate command handler
        if args.command == "encode":
            return encode.main(args)
        elif args.command == "phi":
            return phi.main(args)
        elif args.command == "sample":
            return sample.main(args)
        elif args.command == "sweep":
            return sweep.main(args)
        elif args.command == "stats":
            return stats.main(args)
        elif args.command == "pipeline":
            return pipeline.main(args)
        elif args.command == "generate-config":
            return generate_config.main(args)
        else:
            print(f"Unknown command: {args.command}", file=sys.stderr)
            return common.EXIT_COMPUTATION

    except KeyboardInterrupt as e:
        print("\nOperation cancelled by user", file=sys.stderr)
        return common.report_error(e)
    except Exception as e:
        return common.report_error(e)


if __name__ == "__main__":
    sys.exit(main())
