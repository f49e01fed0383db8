"""
group-phi sweep command

Sweeps the time delay over state matrices, or the packet time step over
packet captures, and writes the mean-phi profile as CSV, JSON and SVG.
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import cast

from ..analyzers.plots import plot_sweep
from ..analyzers.sweeps import sweep_step_size, sweep_time_delay
from ..config.run_config import RunConfig
from ..core.models import PhiMethod, SweepResult
from ..encoders import PacketEncoder
from ..utils.io_utils import read_state_matrix, write_json, write_sweep
from . import common
from .sample import sample_config

logger = logging.getLogger(__name__)


def add_parser(subparsers: common.SubParsers) -> argparse.ArgumentParser:
    """Add sweep command parser.

    Args:
        subparsers: Subparser action to add the sweep command to.

    Returns:
        Configured ArgumentParser for the sweep command.
    """
    parser: argparse.ArgumentParser = subparsers.add_parser(
        "sweep",
        help="Sweep tau over state matrices or delta over packet captures",
        description=(
            "tau: mean stabilized phi across state matrices (one per group) for "
            "each time delay. delta: mean stabilized phi at tau = 1 across node "
            "subsamples of packet captures for each time step size."
        ),
    )
    parser.add_argument("parameter", choices=["tau", "delta"], help="Swept parameter")
    parser.add_argument(
        "--input",
        "-i",
        required=True,
        nargs="+",
        help="State matrix CSVs (tau) or packet CSVs (delta)",
    )
    parser.add_argument("--taus", type=common.int_list, help="Delays, e.g. 1-30 or 1,5,10")
    parser.add_argument(
        "--deltas", type=common.float_list, help="Step sizes in ms, e.g. 10,50,100"
    )
    common.add_common_arguments(parser, "Output directory")
    common.add_phi_arguments(parser)
    common.add_sampling_arguments(parser)
    common.add_packet_arguments(parser)
    return parser


def write_sweep_outputs(result: SweepResult, directory: Path, config: RunConfig) -> None:
    """``sweep_<parameter>.csv``, ``.json`` and ``.svg`` in ``directory``."""
    stem = "sweep_tau" if result.parameter == "tau" else "sweep_delta"
    write_sweep(result, directory / f"{stem}.csv", config.seed, config.echo())
    write_json(directory / f"{stem}.json", result, config.seed, config.echo())
    plot_sweep(result, directory / f"{stem}.svg", deterministic=config.deterministic)


def run_tau_sweep(config: RunConfig, method: PhiMethod) -> SweepResult:
    groups = [read_state_matrix(path) for path in config.inputs]
    return sweep_time_delay(
        groups,
        config.taus,
        method=method,
        max_nodes=config.max_nodes,
        stabilize=config.stabilize,
        workers=config.workers,
    )


def run_delta_sweep(config: RunConfig, method: PhiMethod) -> SweepResult:
    encoder = PacketEncoder()
    captures = [encoder.load(path) for path in config.inputs]
    return sweep_step_size(
        captures,
        sample_config(config),
        config.deltas,
        config.replicates,
        span_ms=config.span_ms,
        method=method,
        max_nodes=config.max_nodes,
        stabilize=config.stabilize,
        workers=config.workers,
    )


def main(args: argparse.Namespace) -> int:
    """Sweep command entry point.

    Args:
        args: Parsed command line arguments.

    Returns:
        Exit code.
    """
    inputs = common.check_inputs(args.input)
    config = common.resolve_config(args, "sweep", args.parameter, inputs)
    output = common.require_output(config)

    if args.parameter == "tau":
        method = cast(PhiMethod, config.method or "empirical")
        result = run_tau_sweep(config, method)
    else:
        method = cast(PhiMethod, config.method or "atomic")
        result = run_delta_sweep(config, method)

    write_sweep_outputs(result, output, config)
    logger.info(f"Best {result.parameter}: {result.argmax:g}")
    return common.EXIT_OK
