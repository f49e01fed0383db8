"""
group-phi sample command

Draws node subsamples of a packet graph, one node-set file per replicate.
"""

from __future__ import annotations

import argparse
import logging
from typing import cast

from ..config.run_config import RunConfig
from ..encoders import PacketEncoder
from ..sampling import SampleConfig, build_packet_graph, replicate_samples, sample_nodes
from ..sampling.samplers import SamplerMethod
from ..utils.io_utils import write_json, write_node_sets
from . import common

logger = logging.getLogger(__name__)


def add_parser(subparsers: common.SubParsers) -> argparse.ArgumentParser:
    """Add sample command parser.

    Args:
        subparsers: Subparser action to add the sample command to.

    Returns:
        Configured ArgumentParser for the sample command.
    """
    parser: argparse.ArgumentParser = subparsers.add_parser(
        "sample",
        help="Draw node subsamples of a packet graph",
        description=(
            "Build the sent-to graph of a packet CSV (timestamp_us,src,dst) and "
            "write replicate_###.txt node sets (one host per line) to --output."
        ),
    )
    parser.add_argument("--input", "-i", required=True, help="Packet CSV")
    parser.add_argument(
        "--start", help="Start host for a single sample (default: random per replicate)"
    )
    common.add_common_arguments(parser, "Output directory for node-set files")
    common.add_sampling_arguments(parser)
    return parser


def sample_config(config: RunConfig) -> SampleConfig:
    return SampleConfig(
        method=cast(SamplerMethod, config.sampler),
        goal=config.goal,
        walk_continue_probability=config.walk_continue_probability,
        fire_mean=config.fire_mean,
        seed=config.seed,
    )


def main(args: argparse.Namespace) -> int:
    """Sample command entry point.

    Args:
        args: Parsed command line arguments.

    Returns:
        Exit code.
    """
    inputs = common.check_inputs([args.input])
    config = common.resolve_config(args, "sample", None, inputs)
    output = common.require_output(config)

    packets = PacketEncoder().load(args.input)
    graph = build_packet_graph(packets)
    sampling = sample_config(config)
    logger.info(
        f"Sampling {config.replicates} x {config.goal} of {len(graph)} hosts "
        f"({config.sampler})"
    )
    if args.start is not None:
        samples = [sample_nodes(graph, sampling, start=args.start)]
    else:
        samples = replicate_samples(graph, sampling, config.replicates, config.workers)

    files = write_node_sets(samples, output)
    write_json(
        output / "samples.json",
        {
            "graph_nodes": len(graph),
            "graph_links": graph.to_networkx().number_of_edges(),
            "files": [path.name for path in files],
        },
        config.seed,
        config.echo(),
    )
    return common.EXIT_OK
