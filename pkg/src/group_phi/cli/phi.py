"""
group-phi phi command

Computes phi of one state matrix and reports it as JSON.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import cast

from ..core.models import PhiMethod
from ..core.stability import stabilized_phi, uncorrected_phi
from ..core.state import StateMatrix
from ..exceptions import InputFormatError
from ..utils.io_utils import (
    dumps_json,
    output_metadata,
    read_node_set,
    read_state_matrix,
    write_json,
)
from . import common

logger = logging.getLogger(__name__)


def select_nodes(states: StateMatrix, path: str) -> StateMatrix:
    """Restrict ``states`` to the labels listed in a node-set file, in file order."""
    labels = read_node_set(path)
    if not labels:
        raise InputFormatError("Node set is empty", path)
    missing = [label for label in labels if label not in states.node_labels]
    if missing:
        raise InputFormatError(f"Nodes {missing} are not columns of the matrix", path)
    return states.select([states.index_of(label) for label in labels])


def add_parser(subparsers: common.SubParsers) -> argparse.ArgumentParser:
    """Add phi command parser.

    Args:
        subparsers: Subparser action to add the phi command to.

    Returns:
        Configured ArgumentParser for the phi command.
    """
    parser: argparse.ArgumentParser = subparsers.add_parser(
        "phi",
        help="Compute phi of a state matrix",
        description=(
            "Compute empirical phi (bipartition search), auto-regressive phi "
            "(bipartition search) or atomic auto-regressive phi of a state "
            "matrix CSV. Writes JSON to --output, or to stdout."
        ),
    )
    parser.add_argument(
        "method", choices=["empirical", "ar", "atomic"], help="Phi estimator"
    )
    parser.add_argument("--input", "-i", required=True, help="State matrix CSV")
    parser.add_argument(
        "--nodes",
        help="Node-set file (one label per line) selecting the columns to use",
    )
    common.add_common_arguments(parser, "Output JSON (default: stdout)")
    common.add_phi_arguments(parser, method=False)
    return parser


def main(args: argparse.Namespace) -> int:
    """Phi command entry point.

    Args:
        args: Parsed command line arguments.

    Returns:
        Exit code.
    """
    inputs = common.check_inputs([args.input, *([args.nodes] if args.nodes else [])])
    config = common.resolve_config(args, "phi", args.method, inputs)
    method = cast(PhiMethod, common.METHOD_ALIASES[args.method])
    states = read_state_matrix(args.input)
    if args.nodes:
        states = select_nodes(states, args.nodes)
    logger.info(
        f"Computing {method} phi of {states.n_steps} x {states.n_nodes} matrix "
        f"at tau={config.tau}"
    )

    if config.stabilize:
        result = stabilized_phi(states, config.tau, method, config.max_nodes)
    else:
        result = uncorrected_phi(states, config.tau, method, config.max_nodes)
    logger.info(f"phi = {result.value:.6f} bits ({'valid' if result.valid else 'invalid'})")

    if config.output:
        write_json(config.output, result, config.seed, config.echo())
    else:
        payload = output_metadata(config.seed, config.echo())
        payload["result"] = result
        sys.stdout.write(dumps_json(payload))
    return common.EXIT_OK
