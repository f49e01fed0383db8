"""Plug-in entropy and mutual information over lagged state pairs.

All quantities are in bits. States of a node subset are bit-packed into
integers (column ``j`` of the subset becomes bit ``j``), so a joint
distribution is simply a count over ``(past_code, present_code)`` pairs.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Any, Union

import numpy as np
import numpy.typing as npt
from scipy.special import entr

from ..exceptions import EmptySubset, TauOutOfRange, UnnormalizedDistribution
from .state import StateMatrix

NORMALIZATION_TOLERANCE = 1e-9
_LN2 = math.log(2.0)
# Widest subset that still packs into an int64 code.
MAX_PACKED_BITS = 62


class Direction(str, Enum):
    """Which side of a lagged pair is conditioned on."""

    PAST_GIVEN_PRESENT = "past-given-present"
    PRESENT_GIVEN_PAST = "present-given-past"


@dataclass(frozen=True)
class JointLagDistribution:
    """Empirical joint distribution of (state at t - tau, state at t).

    Attributes:
        subset: Node indices the states are restricted to.
        tau: Lag in steps.
        table: Probability per ``(past, present)`` bit-pattern pair.
        sample_count: Number of transition pairs, ``T - tau``.
    """

    subset: tuple[int, ...]
    tau: int
    table: Mapping[tuple[int, int], float]
    sample_count: int

    def past_marginal(self) -> dict[int, float]:
        return _marginal(self.table, 0)

    def present_marginal(self) -> dict[int, float]:
        return _marginal(self.table, 1)


def _marginal(table: Mapping[tuple[int, int], float], side: int) -> dict[int, float]:
    marginal: dict[int, float] = {}
    for pair, p in table.items():
        marginal[pair[side]] = marginal.get(pair[side], 0.0) + p
    return marginal


def check_tau(tau: int, n_steps: int) -> None:
    if not 1 <= tau <= n_steps - 1:
        raise TauOutOfRange(f"tau must lie in 1..{n_steps - 1}, got {tau}")


def pack_states(columns: npt.NDArray[Any]) -> npt.NDArray[np.int64]:
    """Encode each row of a binary (T, k) array as one integer code.

    Up to 62 columns the code is the bit pattern itself. Wider subsets get
    dense ids from ``np.unique``; they still identify states uniquely, which
    is all the entropy estimators need.
    """
    k = columns.shape[1]
    if k <= MAX_PACKED_BITS:
        weights = np.left_shift(np.int64(1), np.arange(k, dtype=np.int64))
        return columns.astype(np.int64) @ weights
    _, inverse = np.unique(columns, axis=0, return_inverse=True)
    return inverse.reshape(-1).astype(np.int64)


def _counts(codes: npt.NDArray[np.int64]) -> npt.NDArray[np.int64]:
    return np.unique(codes, return_counts=True)[1]


def _pair_counts(
    past: npt.NDArray[np.int64], present: npt.NDArray[np.int64]
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Unique (past, present) pairs as an (m, 2) array plus their counts."""
    width = max(int(past.max(initial=0)), int(present.max(initial=0))).bit_length()
    if width <= 31:
        combined = (past << width) | present
        keys, counts = np.unique(combined, return_counts=True)
        mask = (np.int64(1) << width) - 1
        return np.column_stack((keys >> width, keys & mask)), counts
    pairs, counts = np.unique(np.column_stack((past, present)), axis=0, return_counts=True)
    return pairs, counts


def entropy_from_counts(counts: npt.NDArray[np.int64]) -> float:
    """Plug-in entropy in bits of a histogram."""
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(entr(p).sum() / _LN2)


def code_entropy(codes: npt.NDArray[np.int64]) -> float:
    """Entropy in bits of the empirical distribution of integer codes."""
    return entropy_from_counts(_counts(codes))


def lagged_codes(
    codes: npt.NDArray[np.int64], tau: int
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Split a code series into aligned (past, present) arrays."""
    return codes[:-tau], codes[tau:]


def code_mutual_information(
    past: npt.NDArray[np.int64], present: npt.NDArray[np.int64]
) -> float:
    """I(past; present) in bits for aligned code arrays, clamped at 0."""
    _, joint_counts = _pair_counts(past, present)
    value = (
        code_entropy(past) + code_entropy(present) - entropy_from_counts(joint_counts)
    )
    return max(value, 0.0)


def joint_lag_distribution(
    states: StateMatrix, subset: Sequence[int], tau: int
) -> JointLagDistribution:
    """Estimate P(X_{t-tau}, X_t) restricted to ``subset``.

    Every overlapping pair ``t = tau..T-1`` contributes weight ``1/(T - tau)``.

    Raises:
        EmptySubset: If ``subset`` is empty.
        TauOutOfRange: If ``tau`` is not in ``1..T-1``.
    """
    nodes = tuple(int(i) for i in subset)
    if not nodes:
        raise EmptySubset("joint_lag_distribution needs at least one node")
    check_tau(tau, states.n_steps)

    codes = _exact_codes(states.values[:, list(nodes)])
    past, present = codes[:-tau], codes[tau:]
    sample_count = len(past)

    table: dict[tuple[int, int], float] = {}
    for pair in zip(past, present):
        table[pair] = table.get(pair, 0) + 1
    distribution = {pair: count / sample_count for pair, count in table.items()}
    return JointLagDistribution(
        subset=nodes, tau=tau, table=distribution, sample_count=sample_count
    )


def _exact_codes(columns: npt.NDArray[Any]) -> list[int]:
    """Bit-pattern codes as Python ints, exact for any subset width."""
    if columns.shape[1] <= MAX_PACKED_BITS:
        return [int(code) for code in pack_states(columns)]
    return [
        sum(int(bit) << j for j, bit in enumerate(row)) for row in columns.tolist()
    ]


ProbabilityTable = Union[Mapping[Any, float], Sequence[float], npt.NDArray[np.float64]]


def entropy(dist: ProbabilityTable) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0.

    Args:
        dist: Mapping from outcome to probability, or a flat probability array.

    Raises:
        UnnormalizedDistribution: If probabilities are negative or do not sum to 1.
    """
    values = list(dist.values()) if isinstance(dist, Mapping) else dist
    p = np.asarray(values, dtype=np.float64).ravel()
    if (p < 0).any() or abs(p.sum() - 1.0) > NORMALIZATION_TOLERANCE:
        raise UnnormalizedDistribution(
            f"Probabilities must be non-negative and sum to 1 (sum={p.sum():.12g})"
        )
    return float(entr(p).sum() / _LN2)


def conditional_entropy(
    joint: JointLagDistribution,
    direction: Union[Direction, str] = Direction.PAST_GIVEN_PRESENT,
) -> float:
    """H(A | B) = H(A, B) - H(B) for one side of a lagged joint.

    ``past-given-present`` gives H(X_{t-tau} | X_t), the term phi is built on.
    """
    direction = Direction(direction)
    h_joint = entropy(joint.table)
    if direction is Direction.PAST_GIVEN_PRESENT:
        h_condition = entropy(joint.present_marginal())
    else:
        h_condition = entropy(joint.past_marginal())
    return max(h_joint - h_condition, 0.0)


def mutual_information(joint: JointLagDistribution) -> float:
    """I(past; present) = H(past) + H(present) - H(past, present), in bits."""
    value = (
        entropy(joint.past_marginal())
        + entropy(joint.present_marginal())
        - entropy(joint.table)
    )
    return max(value, 0.0)
