"""Empirical phi and the minimum information bipartition search.

Effective information of a bipartition is the lagged mutual information of
the whole system minus that of each block. The search enumerates every
unordered bipartition, normalizes effective information by the smaller of
the two blocks' entropies and keeps the minimum. Phi is the effective
information (not the normalized score) at that bipartition.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Optional

import numpy as np
import numpy.typing as npt

from ..config.defaults import DEFAULT_NODE_CAP, NORMALIZATION_FLOOR
from ..exceptions import (
    AllBipartitionsDegenerate,
    InvalidPartition,
    NodeCapExceeded,
    SingularCovariance,
)
from .autoregressive import AutoregressiveTerms, SeriesInput, phi_atomic
from .information import (
    MAX_PACKED_BITS,
    check_tau,
    code_entropy,
    code_mutual_information,
    pack_states,
)
from .models import PhiMethod, PhiResult, validate_phi
from .state import Partition, StateMatrix

logger = logging.getLogger(__name__)

_LN2 = float(np.log(2.0))


class EmpiricalTerms:
    """Memoized lagged mutual information and past entropy per node block."""

    def __init__(self, states: StateMatrix, tau: int) -> None:
        check_tau(tau, states.n_steps)
        self.states = states
        self.tau = tau
        self._full_codes: Optional[npt.NDArray[np.int64]] = None
        if states.n_nodes <= MAX_PACKED_BITS:
            self._full_codes = pack_states(states.values)
        self._information: dict[tuple[int, ...], float] = {}
        self._past_entropy: dict[tuple[int, ...], float] = {}

    def _codes(self, block: Sequence[int]) -> npt.NDArray[np.int64]:
        if self._full_codes is not None:
            mask = np.int64(sum(1 << i for i in block))
            return self._full_codes & mask
        return pack_states(self.states.values[:, list(block)])

    def mutual_information(self, block: Sequence[int]) -> float:
        """I(block at t - tau; block at t) in bits."""
        key = tuple(block)
        if key not in self._information:
            codes = self._codes(key)
            self._information[key] = code_mutual_information(
                codes[: -self.tau], codes[self.tau :]
            )
        return self._information[key]

    def past_entropy(self, block: Sequence[int]) -> float:
        """H(block at t - tau) in bits."""
        key = tuple(block)
        if key not in self._past_entropy:
            self._past_entropy[key] = code_entropy(self._codes(key)[: -self.tau])
        return self._past_entropy[key]

    def effective_information(self, partition: Partition) -> float:
        whole = self.mutual_information(range(self.states.n_nodes))
        return whole - sum(self.mutual_information(block) for block in partition.blocks)


def _check_bipartition(partition: Partition, n_nodes: int) -> None:
    if partition.n_nodes != n_nodes:
        raise InvalidPartition(
            f"Partition covers {partition.n_nodes} nodes, data has {n_nodes}"
        )
    if not partition.is_bipartition:
        raise InvalidPartition(
            f"Expected a bipartition, got {len(partition.blocks)} blocks"
        )


def effective_information(states: StateMatrix, tau: int, bipartition: Partition) -> float:
    """Effective information of ``bipartition`` in bits.

    May be negative for a bipartition that is not the MIB; the estimate is
    reported as-is.

    Raises:
        TauOutOfRange: If ``tau`` is not in ``1..T-1``.
        InvalidPartition: If ``bipartition`` is not a 2-block partition of
            the matrix's nodes.
    """
    _check_bipartition(bipartition, states.n_nodes)
    return EmpiricalTerms(states, tau).effective_information(bipartition)


def _empirical_candidate(
    terms: EmpiricalTerms, partition: Partition
) -> tuple[float, float]:
    value = terms.effective_information(partition)
    normalization = min(terms.past_entropy(block) for block in partition.blocks)
    return value, normalization


def _autoregressive_candidate(
    terms: AutoregressiveTerms, partition: Partition
) -> tuple[float, float]:
    value = terms.phi_nats(partition) / _LN2
    normalization = min(terms.term(block).gaussian_entropy for block in partition.blocks)
    return value, normalization


def _node_count(states: SeriesInput) -> int:
    if isinstance(states, StateMatrix):
        return states.n_nodes
    return int(np.asarray(states).shape[1])


def minimum_information_bipartition(
    states: SeriesInput,
    tau: int,
    method: PhiMethod = "empirical",
    max_nodes: int = DEFAULT_NODE_CAP,
) -> tuple[Partition, PhiResult]:
    """Search all bipartitions for the one with least normalized information.

    Bipartitions are enumerated by a bitmask over nodes ``0..N-2`` (node
    ``N-1`` is always in the second block), so each unordered split is seen
    once and ties go to the first mask in increasing order.

    Args:
        states: Binary state matrix; the autoregressive method also accepts
            a real-valued (T, N) array.
        tau: Lag in steps.
        method: ``"empirical"`` evaluates effective information over
            discrete states, normalized by past-state entropy in bits.
            ``"autoregressive"`` evaluates Gaussian phi, normalized by each
            block's Gaussian entropy in nats; blocks with singular
            covariances are skipped.
        max_nodes: Hard cap on N.

    Returns:
        The MIB and the phi result at it.

    Raises:
        NodeCapExceeded: If N exceeds ``max_nodes``.
        InvalidPartition: If N < 2.
        AllBipartitionsDegenerate: If every bipartition had zero
            normalization.
        SingularCovariance: If the whole-system covariance is singular
            (autoregressive only).
    """
    n_nodes = _node_count(states)
    if n_nodes > max_nodes:
        raise NodeCapExceeded(
            f"Bipartition search is capped at {max_nodes} nodes, got {n_nodes}"
        )
    if n_nodes < 2:
        raise InvalidPartition(f"A bipartition needs at least 2 nodes, got {n_nodes}")

    if method == "empirical":
        if not isinstance(states, StateMatrix):
            raise TypeError("Empirical phi needs a StateMatrix")
        empirical = EmpiricalTerms(states, tau)
        labels = list(states.node_labels)

        def evaluate(partition: Partition) -> tuple[float, float]:
            return _empirical_candidate(empirical, partition)

        floor = NORMALIZATION_FLOOR
    elif method == "autoregressive":
        gaussian = AutoregressiveTerms(states, tau)
        gaussian.term(tuple(range(n_nodes)))
        labels = gaussian.labels

        def evaluate(partition: Partition) -> tuple[float, float]:
            return _autoregressive_candidate(gaussian, partition)

        floor = 0.0
    else:
        raise ValueError(f"No bipartition search for method {method!r}")

    best: Optional[tuple[float, float, Partition]] = None
    skipped = 0
    for mask in range(1, 1 << (n_nodes - 1)):
        partition = Partition.from_mask(mask, n_nodes)
        try:
            value, normalization = evaluate(partition)
        except SingularCovariance:
            skipped += 1
            continue
        if normalization <= floor:
            skipped += 1
            continue
        score = value / normalization
        if best is None or score < best[0]:
            best = (score, value, partition)

    if best is None:
        raise AllBipartitionsDegenerate(
            f"All {(1 << (n_nodes - 1)) - 1} bipartitions have zero normalization"
        )
    _, value, partition = best
    logger.debug(
        f"MIB ({method}, tau={tau}) {partition.labelled(labels)} "
        f"phi={value:.6f}, skipped {skipped}"
    )
    result = PhiResult(
        value=value,
        method=method,
        partition=partition.labelled(labels),
        tau=tau,
        n_nodes=n_nodes,
        valid=validate_phi(value, n_nodes),
    )
    return partition, result


def compute_phi(
    states: StateMatrix,
    tau: int,
    method: PhiMethod,
    max_nodes: int = DEFAULT_NODE_CAP,
) -> tuple[float, Partition]:
    """Phi of ``states`` by ``method``, with the partition it refers to.

    ``empirical`` and ``autoregressive`` report phi at their MIB; ``atomic``
    reports autoregressive phi at the all-singleton partition.
    """
    if method == "atomic":
        result = phi_atomic(states, tau)
        return result.value, Partition.atomic(states.n_nodes)
    partition, result = minimum_information_bipartition(states, tau, method, max_nodes)
    return result.value, partition
