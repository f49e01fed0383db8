"""
group-phi encode command

Encodes an interaction log into a state matrix CSV.
"""

from __future__ import annotations

import argparse
import logging
import re
from pathlib import Path
from typing import Any

from ..config.run_config import RunConfig
from ..encoders import (
    BaseEncoder,
    ChatEncoder,
    EditEncoder,
    PacketEncoder,
    TurnEncoder,
)
from ..utils.io_utils import write_json, write_state_matrix
from . import common

logger = logging.getLogger(__name__)

FORMATS = ("turns", "chat", "edits", "packets")


def add_parser(subparsers: common.SubParsers) -> argparse.ArgumentParser:
    """Add encode command parser.

    Args:
        subparsers: Subparser action to add the encode command to.

    Returns:
        Configured ArgumentParser for the encode command.
    """
    parser: argparse.ArgumentParser = subparsers.add_parser(
        "encode",
        help="Encode an interaction log as a binary state matrix",
        description=(
            "Encode volume tracks, chat lines, edit logs or packet records as a "
            "state matrix CSV (t,<label1>,...,<labelN>). Edit logs produce one "
            "matrix per quality window; --output is then a directory."
        ),
    )
    parser.add_argument("format", choices=FORMATS, help="Input log format")
    parser.add_argument("--input", "-i", required=True, help="Input CSV log")
    common.add_common_arguments(parser, "Output CSV (directory for edits)")
    common.add_turn_arguments(parser)
    common.add_chat_arguments(parser)
    common.add_edit_arguments(parser)
    common.add_packet_arguments(parser)
    return parser


def turn_encoder(config: RunConfig) -> TurnEncoder:
    if config.threshold is None:
        raise ValueError("Turn encoding needs --threshold")
    return TurnEncoder(
        {
            "threshold": config.threshold,
            "step_ms": config.step_ms,
            "merge_gap_ms": config.merge_gap_ms,
            "crosstalk_margin": config.crosstalk_margin,
        }
    )


def chat_encoder(config: RunConfig) -> ChatEncoder:
    return ChatEncoder({"roster": config.roster})


def edit_encoder(config: RunConfig) -> EditEncoder:
    return EditEncoder({"window_days": config.window_days, "max_edits": config.max_edits})


def packet_encoder(config: RunConfig) -> PacketEncoder:
    if config.delta_ms is None:
        raise ValueError("Packet encoding needs --delta-ms")
    return PacketEncoder(
        {"delta_ms": config.delta_ms, "span_ms": config.span_ms, "nodes": config.nodes}
    )


def window_file_name(article: str, window_days: int, index: int) -> str:
    """File-system safe name of one quality window's matrix."""
    slug = re.sub(r"[^A-Za-z0-9._-]+", "_", article).strip("_") or "article"
    return f"{slug}_{window_days}d_{index:03d}.csv"


def encode_edit_windows(
    config: RunConfig, source: str, directory: Path
) -> list[dict[str, Any]]:
    """Write one matrix per quality window and return the window index."""
    encoder = edit_encoder(config)
    rows: list[dict[str, Any]] = []
    counters: dict[tuple[str, int], int] = {}
    for window, matrix in encoder.encode_file(source):
        key = (window.article, window.window_days)
        counters[key] = counters.get(key, 0) + 1
        name = window_file_name(window.article, window.window_days, counters[key])
        write_state_matrix(matrix, directory / name, config.seed, config.echo())
        rows.append(
            {
                "file": name,
                "article": window.article,
                "window_days": window.window_days,
                "new_quality": window.new_quality,
                "change_time": window.change_time.isoformat(),
                "n_editors": len(window.editors),
                "n_edits": len(window.edits),
            }
        )
    return rows


def main(args: argparse.Namespace) -> int:
    """Encode command entry point.

    Args:
        args: Parsed command line arguments.

    Returns:
        Exit code.
    """
    inputs = common.check_inputs([args.input])
    config = common.resolve_config(args, "encode", args.format, inputs)
    output = common.require_output(config)
    logger.info(f"Encoding {args.format} log {args.input}")

    if args.format == "edits":
        rows = encode_edit_windows(config, args.input, output)
        write_json(output / "windows.json", rows, config.seed, config.echo())
        logger.info(f"Encoded {len(rows)} quality windows into {output}")
        return common.EXIT_OK

    encoder: BaseEncoder
    if args.format == "turns":
        encoder = turn_encoder(config)
    elif args.format == "chat":
        encoder = chat_encoder(config)
    else:
        encoder = packet_encoder(config)
    matrix = encoder.encode_file(args.input)
    write_state_matrix(matrix, output, config.seed, config.echo())
    logger.info(f"Encoded {matrix.n_steps} steps x {matrix.n_nodes} nodes")
    return common.EXIT_OK
