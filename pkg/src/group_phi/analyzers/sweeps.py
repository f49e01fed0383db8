"""
Parameter sweeps over the time delay (tau) and the packet time step (delta).

Every grid point is the mean of stabilized phi over a set of state
matrices: the groups of a study for tau, the node subsamples of one or
more packet captures for delta. Grid points where every computation fails
are reported as NaN with ``n_valid = 0``.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from functools import partial
from typing import Callable, Literal, Optional, Union, cast

import pandas as pd

from ..config.defaults import DEFAULT_NODE_CAP, PACKET_TAU
from ..core.information import check_tau
from ..core.models import PhiMethod, PhiResult, SweepResult
from ..core.stability import averaged_phi, stabilized_phi, uncorrected_phi
from ..core.state import StateMatrix
from ..encoders.packet_encoder import (
    PacketInput,
    encode_packets,
    packet_span,
    packets_frame,
)
from ..exceptions import (
    AllBipartitionsDegenerate,
    EmptySample,
    ExhaustedNodes,
    NoValidResults,
    SingularCovariance,
)
from ..sampling.graph import build_packet_graph
from ..sampling.samplers import NodeSample, SampleConfig, replicate_samples
from ..utils.parallel import ordered_map

logger = logging.getLogger(__name__)

# Failures that leave a single group or replicate without a value.
_PHI_FAILURES = (ExhaustedNodes, SingularCovariance, AllBipartitionsDegenerate)


def phi_or_none(
    states: StateMatrix,
    tau: int,
    method: PhiMethod,
    max_nodes: int = DEFAULT_NODE_CAP,
    stabilize: bool = True,
) -> Optional[PhiResult]:
    """Phi of one matrix, or ``None`` if it cannot be computed.

    Without stabilization an invalid value is returned as-is, flagged
    ``valid=False``.
    """
    try:
        if stabilize:
            return stabilized_phi(states, tau, method, max_nodes)
        return uncorrected_phi(states, tau, method, max_nodes)
    except _PHI_FAILURES as e:
        logger.debug(f"No {method} phi at tau={tau}: {e}")
        return None


def _grid_point(
    results: Sequence[Optional[PhiResult]], label: str
) -> tuple[float, float, int]:
    try:
        average = averaged_phi(r for r in results if r is not None)
    except NoValidResults:
        logger.warning(f"No valid phi at {label}")
        return float("nan"), float("nan"), 0
    return average.mean, average.stderr, average.n_valid


def _finish(
    parameter: Literal["tau", "delta_ms"],
    grid: Sequence[float],
    points: list[tuple[float, float, int]],
) -> SweepResult:
    if all(n_valid == 0 for _, _, n_valid in points):
        raise NoValidResults(f"No grid point of the {parameter} sweep has a valid phi")
    result = SweepResult.from_points(
        parameter,
        [float(v) for v in grid],
        [p[0] for p in points],
        [p[1] for p in points],
        [p[2] for p in points],
    )
    logger.info(f"{parameter} sweep peaks at {result.argmax:g}")
    return result


def sweep_time_delay(
    states: Union[StateMatrix, Sequence[StateMatrix]],
    tau_values: Sequence[int],
    method: PhiMethod = "empirical",
    max_nodes: int = DEFAULT_NODE_CAP,
    stabilize: bool = True,
    workers: int = 1,
) -> SweepResult:
    """Mean phi across groups for each time delay.

    Args:
        states: One matrix, or one per group.
        tau_values: Delays in steps.
        method: Phi estimator.
        max_nodes: Cap for the bipartition search.
        stabilize: Apply stability correction per group.
        workers: Threads used across groups.

    Raises:
        TauOutOfRange: If a delay is not in ``1..T-1`` for some group.
        NoValidResults: If no delay yields a valid phi.
    """
    groups = [states] if isinstance(states, StateMatrix) else list(states)
    if not groups:
        raise EmptySample("No state matrices to sweep")
    for tau in tau_values:
        for group in groups:
            check_tau(int(tau), group.n_steps)

    points = []
    for tau in tau_values:
        compute = partial(
            phi_or_none,
            tau=int(tau),
            method=method,
            max_nodes=max_nodes,
            stabilize=stabilize,
        )
        results = ordered_map(compute, groups, workers)
        points.append(_grid_point(results, f"tau={tau}"))
        logger.info(f"tau={tau}: mean phi {points[-1][0]:.4f} ({points[-1][2]} valid)")
    return _finish("tau", tau_values, points)


def _captures(packets: Union[PacketInput, Sequence[pd.DataFrame]]) -> list[pd.DataFrame]:
    if isinstance(packets, (list, tuple)) and packets and all(
        isinstance(p, pd.DataFrame) for p in packets
    ):
        return [packets_frame(p) for p in packets]
    return [packets_frame(cast(PacketInput, packets))]


def sample_encoder(
    packets: pd.DataFrame, delta_ms: float, span_ms: Optional[float] = None
) -> Callable[[NodeSample], StateMatrix]:
    """Encoder of node samples for one capture.

    Bins start at the capture's first packet; the span defaults to the
    capture's duration plus one step.
    """
    origin_us, covered_ms = packet_span(packets)
    span = span_ms if span_ms is not None else covered_ms + delta_ms
    return partial(
        encode_packets, packets, delta_ms=delta_ms, span_ms=span, origin_us=origin_us
    )


def sampled_phi(
    packets: pd.DataFrame,
    samples: Sequence[NodeSample],
    delta_ms: float,
    span_ms: Optional[float] = None,
    method: PhiMethod = "atomic",
    max_nodes: int = DEFAULT_NODE_CAP,
    stabilize: bool = True,
    workers: int = 1,
) -> list[Optional[PhiResult]]:
    """Phi at ``tau = 1`` of every node sample of one capture."""
    encode = sample_encoder(packets, delta_ms, span_ms)

    def one(sample: NodeSample) -> Optional[PhiResult]:
        return phi_or_none(encode(sample), PACKET_TAU, method, max_nodes, stabilize)

    return ordered_map(one, samples, workers)


def sweep_step_size(
    packets: Union[PacketInput, Sequence[pd.DataFrame]],
    sampling: SampleConfig,
    delta_values: Sequence[float],
    replicates: int,
    span_ms: Optional[float] = None,
    method: PhiMethod = "atomic",
    max_nodes: int = DEFAULT_NODE_CAP,
    stabilize: bool = True,
    workers: int = 1,
) -> SweepResult:
    """Mean phi over node subsamples for each packet time step.

    Node samples are drawn once per capture and reused at every step size.
    With several captures the replicates of all captures are pooled.

    Raises:
        EmptySample: If there are no packets.
        InsufficientNodes: If a capture has fewer hosts than the goal.
        NoValidResults: If no step size yields a valid phi.
    """
    captures = _captures(packets)
    if all(frame.empty for frame in captures):
        raise EmptySample("No packets to sweep")
    drawn = [
        replicate_samples(build_packet_graph(frame), sampling, replicates, workers)
        for frame in captures
    ]

    points = []
    for delta in delta_values:
        results: list[Optional[PhiResult]] = []
        for frame, samples in zip(captures, drawn):
            results.extend(
                sampled_phi(
                    frame, samples, float(delta), span_ms, method, max_nodes,
                    stabilize, workers,
                )
            )
        points.append(_grid_point(results, f"delta={delta} ms"))
        logger.info(
            f"delta={delta} ms: mean phi {points[-1][0]:.4f} ({points[-1][2]} valid)"
        )
    return _finish("delta_ms", delta_values, points)
