"""Shared argument groups, configuration and error reporting for the CLI."""

from __future__ import annotations

import argparse
import errno
import json
import logging
import os
import sys
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any, Callable, Optional

from ..config.run_config import RunConfig, RunConfigManager
from ..config.settings import FIELD_PATHS
from ..core.state import StateMatrix
from ..exceptions import GroupPhiError, InputFormatError
from ..utils.io_utils import read_state_matrix, write_state_matrix

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_COMPUTATION = 1
EXIT_IO = 2
EXIT_INTERRUPTED = 130

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"

# Command-line spellings of the phi methods.
METHOD_ALIASES: dict[str, str] = {
    "empirical": "empirical",
    "ar": "autoregressive",
    "autoregressive": "autoregressive",
    "atomic": "atomic",
}

SubParsers = argparse._SubParsersAction  # pyright: ignore[reportPrivateUsage]


def int_list(text: str) -> list[int]:
    """Parse ``"1,2,5"`` (or a range ``"1-30"``) into ints."""
    values: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        low, sep, high = part.partition("-")
        if sep and low:
            values.extend(range(int(low), int(high) + 1))
        else:
            values.append(int(part))
    if not values:
        raise argparse.ArgumentTypeError(f"expected a list of integers, got {text!r}")
    return values


def float_list(text: str) -> list[float]:
    """Parse ``"10,25,50"`` into floats."""
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e
    if not values:
        raise argparse.ArgumentTypeError(f"expected a list of numbers, got {text!r}")
    return values


def name_list(text: str) -> list[str]:
    """Parse ``"a,b,c"`` into names."""
    return [part.strip() for part in text.split(",") if part.strip()]


def add_common_arguments(parser: argparse.ArgumentParser, output_help: str) -> None:
    """Flags every command accepts."""
    parser.add_argument("--output", "-o", help=output_help)
    parser.add_argument("--config", help="Run configuration file (flat key=value, YAML or JSON)")
    parser.add_argument("--seed", type=int, help="Random seed (default: 0)")
    parser.add_argument("--workers", type=int, help="Worker threads (default: 1)")
    parser.add_argument(
        "--deterministic",
        action="store_true",
        default=None,
        help="Strip creation dates from SVG charts for byte-identical reruns",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="Warnings only")


def add_turn_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("speaking turns")
    group.add_argument("--threshold", type=float, help="Volume threshold for talking")
    group.add_argument("--step-ms", type=int, help="Volume sample step (default: 200)")
    group.add_argument(
        "--merge-gap-ms", type=int, help="Longest pause merged into a turn (default: 400)"
    )
    group.add_argument(
        "--crosstalk-margin",
        type=float,
        help="Overlapping speakers below this fraction of the loudest are dropped (default: 0.5)",
    )


def add_chat_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("chat lines")
    group.add_argument(
        "--roster", type=name_list, help="Comma-separated group members, silent ones included"
    )


def add_edit_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("edit windows")
    group.add_argument(
        "--window-days", type=int_list, help="Window lengths in days (default: 30,60,90)"
    )
    group.add_argument(
        "--max-edits", type=int, help="Drop articles with more edits than this in total"
    )


def add_packet_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("packet binning")
    group.add_argument("--delta-ms", type=float, help="Time step size in milliseconds")
    group.add_argument(
        "--span-ms", type=float, help="Duration to bin (default: capture length + one step)"
    )
    group.add_argument("--nodes", type=name_list, help="Comma-separated hosts to encode")


def add_phi_arguments(parser: argparse.ArgumentParser, method: bool = True) -> None:
    group = parser.add_argument_group("phi")
    if method:
        group.add_argument(
            "--method", choices=sorted(METHOD_ALIASES), help="Phi estimator"
        )
    group.add_argument("--tau", type=int, help="Time delay in steps (default: 1)")
    group.add_argument(
        "--max-nodes", type=int, help="Node cap for bipartition search (default: 16)"
    )
    group.add_argument(
        "--no-stabilize",
        dest="stabilize",
        action="store_false",
        default=None,
        help="Report invalid values instead of dropping low-variance nodes",
    )


def add_sampling_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("node sampling")
    group.add_argument(
        "--sampler",
        choices=["random_walk", "forest_fire", "breadth_first", "random_nodes"],
        help="Sampling method (default: random_walk)",
    )
    group.add_argument("--goal", type=int, help="Nodes per sample (default: 100)")
    group.add_argument("--replicates", type=int, help="Samples to draw (default: 100)")


def add_resume_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--resume",
        action="store_true",
        default=None,
        help="Reuse state matrices already written under <output>/matrices/",
    )


def configure_logging(args: argparse.Namespace) -> None:
    """Configure stderr logging from ``--verbose`` / ``--quiet``."""
    level = logging.INFO
    if getattr(args, "verbose", False):
        level = logging.DEBUG
    elif getattr(args, "quiet", False):
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def check_inputs(paths: Iterable[str]) -> list[str]:
    """Fail early, naming the first input that does not exist."""
    checked = []
    for path in paths:
        if not Path(path).is_file():
            raise FileNotFoundError(errno.ENOENT, os.strerror(errno.ENOENT), path)
        checked.append(path)
    return checked


def resolve_config(
    args: argparse.Namespace,
    command: str,
    subcommand: Optional[str] = None,
    inputs: Optional[Sequence[str]] = None,
) -> RunConfig:
    """Merge defaults, ``--config`` and the flags given on the command line."""
    overrides: dict[str, Any] = {
        key: getattr(args, key)
        for key in FIELD_PATHS
        if getattr(args, key, None) is not None
    }
    if "method" in overrides:
        overrides["method"] = METHOD_ALIASES[overrides["method"]]
    overrides.update(
        command=command,
        subcommand=subcommand,
        inputs=list(inputs or []),
        output=getattr(args, "output", None),
    )
    config = RunConfigManager().load_config(getattr(args, "config", None), overrides)
    logger.debug(f"Resolved configuration: {config.echo()}")
    return config


def require_output(config: RunConfig) -> Path:
    if not config.output:
        raise ValueError(f"{config.command} needs --output")
    return Path(config.output)


def cached_matrix(
    path: Path,
    encode: Callable[[], StateMatrix],
    config: RunConfig,
) -> StateMatrix:
    """Read ``path`` when resuming and it exists; otherwise encode and write it."""
    if config.resume and path.is_file():
        logger.info(f"Resuming from {path}")
        return read_state_matrix(path)
    matrix = encode()
    write_state_matrix(matrix, path, config.seed, config.echo())
    return matrix


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, KeyboardInterrupt):
        return EXIT_INTERRUPTED
    if isinstance(error, (InputFormatError, OSError)):
        return EXIT_IO
    return EXIT_COMPUTATION


def error_payload(error: BaseException) -> dict[str, Any]:
    """Machine-readable description of a failed run."""
    path: Optional[str] = None
    if isinstance(error, InputFormatError):
        path = error.path
    elif isinstance(error, OSError) and error.filename is not None:
        path = str(error.filename)
    message = error.strerror if isinstance(error, OSError) and error.strerror else str(error)
    payload: dict[str, Any] = {
        "error": type(error).__name__,
        "message": message,
        "exit_code": exit_code_for(error),
    }
    if path is not None:
        payload["path"] = path
    return payload


def report_error(error: BaseException) -> int:
    """Write the error JSON to stderr and return the exit status."""
    payload = error_payload(error)
    if isinstance(error, (GroupPhiError, ValueError, OSError)):
        logger.debug("Run failed", exc_info=error)
    else:
        logger.error(f"Unexpected error: {error}", exc_info=error)
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return int(payload["exit_code"])
