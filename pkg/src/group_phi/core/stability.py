"""Validity checks, stability correction and averaging of phi values."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable
from typing import NamedTuple

import numpy as np

from ..config.defaults import DEFAULT_NODE_CAP, DROP_FRACTION
from ..exceptions import (
    AllBipartitionsDegenerate,
    ExhaustedNodes,
    NoValidResults,
    SingularCovariance,
)
from .empirical import compute_phi
from .models import PhiMethod, PhiResult, validate_phi
from .state import StateMatrix

logger = logging.getLogger(__name__)

__all__ = [
    "PhiAverage",
    "averaged_phi",
    "stabilized_phi",
    "uncorrected_phi",
    "validate_phi",
]

# Failures that stability correction may cure by dropping nodes.
_CORRECTABLE = (SingularCovariance, AllBipartitionsDegenerate, np.linalg.LinAlgError)


class PhiAverage(NamedTuple):
    mean: float
    stderr: float
    n_valid: int


def uncorrected_phi(
    states: StateMatrix,
    tau: int,
    method: PhiMethod = "atomic",
    max_nodes: int = DEFAULT_NODE_CAP,
) -> PhiResult:
    """Phi as computed, flagged ``valid=False`` when outside [0, N]."""
    value, partition = compute_phi(states, tau, method, max_nodes)
    return PhiResult(
        value=value,
        method=method,
        partition=partition.labelled(states.node_labels),
        tau=tau,
        n_nodes=states.n_nodes,
        valid=validate_phi(value, states.n_nodes),
    )


def _drop_count(n_nodes: int, fraction: float) -> int:
    return max(1, math.floor(fraction * n_nodes))


def stabilized_phi(
    states: StateMatrix,
    tau: int,
    method: PhiMethod = "atomic",
    max_nodes: int = DEFAULT_NODE_CAP,
    drop_fraction: float = DROP_FRACTION,
) -> PhiResult:
    """Compute phi, dropping low-variance nodes until the value is valid.

    Each retry removes ``max(1, floor(drop_fraction * N))`` of the current
    nodes with the least variance; ties go to the lowest column index.

    Raises:
        ExhaustedNodes: If fewer than 2 nodes remain without a valid value.
        NodeCapExceeded: If the bipartition search cannot run at all.
        TauOutOfRange: If ``tau`` is not in ``1..T-1``.
    """
    current = states
    dropped: list[str] = []
    retries = 0
    while True:
        n_nodes = current.n_nodes
        if n_nodes < 2:
            raise ExhaustedNodes(
                f"No valid {method} phi after dropping {len(dropped)} of "
                f"{states.n_nodes} nodes"
            )
        try:
            value, partition = compute_phi(current, tau, method, max_nodes)
        except _CORRECTABLE as e:
            reason = f"{type(e).__name__}: {e}"
        else:
            if validate_phi(value, n_nodes):
                if retries:
                    logger.info(
                        f"{method} phi valid after {retries} retries "
                        f"({len(dropped)} nodes dropped)"
                    )
                return PhiResult(
                    value=value,
                    method=method,
                    partition=partition.labelled(current.node_labels),
                    tau=tau,
                    n_nodes=n_nodes,
                    dropped_nodes=dropped,
                    retries=retries,
                    valid=True,
                )
            reason = f"value {value:.6g} outside [0, {n_nodes}]"

        n_drop = _drop_count(n_nodes, drop_fraction)
        order = np.argsort(current.variances(), kind="stable")
        drop = set(int(i) for i in order[:n_drop])
        labels = current.labels_for(sorted(drop))
        logger.warning(f"Stability correction ({reason}); dropping {labels}")
        dropped.extend(labels)
        retries += 1
        keep = [i for i in range(n_nodes) if i not in drop]
        if len(keep) < 2:
            raise ExhaustedNodes(
                f"No valid {method} phi after dropping {len(dropped)} of "
                f"{states.n_nodes} nodes"
            )
        current = current.select(keep)


def averaged_phi(results: Iterable[PhiResult]) -> PhiAverage:
    """Mean and standard error over the valid results.

    The standard error is ``std(ddof=1) / sqrt(n)``, and 0 for a single
    valid result.

    Raises:
        NoValidResults: If none of ``results`` is valid.
    """
    values = np.array([r.value for r in results if r.valid], dtype=np.float64)
    if values.size == 0:
        raise NoValidResults("No valid phi values to average")
    mean = float(values.mean())
    stderr = 0.0
    if values.size > 1:
        stderr = float(values.std(ddof=1) / math.sqrt(values.size))
    return PhiAverage(mean=mean, stderr=stderr, n_valid=int(values.size))
