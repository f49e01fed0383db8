"""Auto-regressive (linear-Gaussian) phi.

Each part of a partition is regressed on its own past; phi is the
log-ratio of generalized variances before and after conditioning for the
whole system, minus the same quantity summed over the parts. The Gaussian
machinery is applied to 0/1 series as-is; no Gaussianity test is made.

Every function here also accepts a plain (T, N) float array so that
continuous simulations can be checked against closed forms.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Union

import numpy as np
import numpy.typing as npt

from ..config.defaults import COVARIANCE_RIDGE
from ..exceptions import EmptySubset, InvalidPartition, SingularCovariance
from .information import check_tau
from .models import PhiResult, validate_phi
from .state import Partition, StateMatrix

logger = logging.getLogger(__name__)

# Smallest eigenvalue, relative to the largest, a covariance may have.
CONDITION_FLOOR = 1e-12
_LN2 = math.log(2.0)

SeriesInput = Union[StateMatrix, npt.NDArray[np.float64]]


@dataclass(frozen=True)
class LaggedCovariance:
    """Covariance of a node subset and its lag-tau cross-covariance.

    ``sigma_lag[i, j]`` is cov(x_i at t - tau, x_j at t). Under the
    stationarity assumption ``sigma`` serves both times.
    """

    sigma: npt.NDArray[np.float64]
    sigma_lag: npt.NDArray[np.float64]
    tau: int


@dataclass(frozen=True)
class ResidualCovariance:
    """Covariance of the residuals when predicting present from past."""

    sigma_e: npt.NDArray[np.float64]


def as_series(states: SeriesInput) -> tuple[npt.NDArray[np.float64], list[str]]:
    """Float view of the data plus node labels."""
    if isinstance(states, StateMatrix):
        return states.values.astype(np.float64), list(states.node_labels)
    data = np.asarray(states, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError(f"Expected a (T, N) array, got shape {data.shape}")
    return data, [f"x{i}" for i in range(data.shape[1])]


def _covariances(
    data: npt.NDArray[np.float64], subset: Sequence[int], tau: int
) -> LaggedCovariance:
    columns = data[:, list(subset)]
    centered = columns - columns.mean(axis=0)
    n_steps = centered.shape[0]
    sigma = centered.T @ centered / n_steps
    sigma = (sigma + sigma.T) / 2.0
    sigma_lag = centered[:-tau].T @ centered[tau:] / (n_steps - tau)
    return LaggedCovariance(sigma=sigma, sigma_lag=sigma_lag, tau=tau)


def lagged_covariances(
    states: SeriesInput, subset: Sequence[int], tau: int
) -> LaggedCovariance:
    """Mean-centred covariance and lag-tau cross-covariance of ``subset``.

    Raises:
        EmptySubset: If ``subset`` is empty.
        TauOutOfRange: If ``tau`` is not in ``1..T-1``.
    """
    if len(subset) == 0:
        raise EmptySubset("lagged_covariances needs at least one node")
    data, _ = as_series(states)
    check_tau(tau, data.shape[0])
    return _covariances(data, subset, tau)


def residual_covariance(cov: LaggedCovariance) -> ResidualCovariance:
    """Partial covariance of the present given the past.

    ``sigma_e = sigma - sigma_lag.T @ pinv(sigma + ridge) @ sigma_lag`` with a
    ridge of ``1e-10 * trace / n`` on the past block.

    Raises:
        SingularCovariance: If the regularized past block is still singular.
    """
    sigma = cov.sigma
    n = sigma.shape[0]
    trace = float(np.trace(sigma))
    if not math.isfinite(trace) or trace <= 0.0:
        raise SingularCovariance("Covariance has no variance to condition on")
    regularized = sigma + COVARIANCE_RIDGE * trace / n * np.eye(n)
    if np.linalg.matrix_rank(regularized) < n:
        raise SingularCovariance("Past covariance is singular after regularization")
    explained = cov.sigma_lag.T @ np.linalg.pinv(regularized) @ cov.sigma_lag
    sigma_e = sigma - explained
    return ResidualCovariance(sigma_e=(sigma_e + sigma_e.T) / 2.0)


def _log_det(matrix: npt.NDArray[np.float64], what: str) -> float:
    eigenvalues = np.linalg.eigvalsh(matrix)
    largest = float(eigenvalues.max())
    if not math.isfinite(largest) or largest <= 0.0:
        raise SingularCovariance(f"{what} has no positive variance")
    if float(eigenvalues.min()) <= CONDITION_FLOOR * largest:
        raise SingularCovariance(f"{what} is rank deficient")
    sign, log_det = np.linalg.slogdet(matrix)
    if sign <= 0:
        raise SingularCovariance(f"{what} is not positive definite")
    return float(log_det)


@dataclass(frozen=True)
class _Term:
    integration: float
    log_det_sigma: float
    size: int

    @property
    def gaussian_entropy(self) -> float:
        return 0.5 * (self.size * math.log(2.0 * math.pi * math.e) + self.log_det_sigma)


def _information_term(
    data: npt.NDArray[np.float64], subset: Sequence[int], tau: int
) -> _Term:
    """½ ln(det Σ / det Σ_E) for one block, in nats."""
    cov = _covariances(data, subset, tau)
    residual = residual_covariance(cov)
    log_det_sigma = _log_det(cov.sigma, "Covariance")
    log_det_residual = _log_det(residual.sigma_e, "Residual covariance")
    return _Term(
        integration=0.5 * (log_det_sigma - log_det_residual),
        log_det_sigma=log_det_sigma,
        size=len(subset),
    )


class AutoregressiveTerms:
    """Memoized per-block terms for one data set and lag.

    Shared by the bipartition search, which revisits the same blocks often.
    """

    def __init__(self, states: SeriesInput, tau: int) -> None:
        self.data, self.labels = as_series(states)
        check_tau(tau, self.data.shape[0])
        self.tau = tau
        self._cache: dict[tuple[int, ...], _Term] = {}

    def term(self, block: Sequence[int]) -> _Term:
        key = tuple(block)
        if key not in self._cache:
            self._cache[key] = _information_term(self.data, key, self.tau)
        return self._cache[key]

    def phi_nats(self, partition: Partition) -> float:
        whole = self.term(tuple(range(self.data.shape[1])))
        parts = sum(self.term(block).integration for block in partition.blocks)
        return whole.integration - parts


def phi_autoregressive(
    states: SeriesInput, tau: int, partition: Partition
) -> PhiResult:
    """Auto-regressive phi of ``partition`` in bits.

    The value is reported as computed; ``valid`` records whether it lies in
    ``[0, N]`` but nothing is corrected here.

    Raises:
        TauOutOfRange: If ``tau`` is not in ``1..T-1``.
        InvalidPartition: If ``partition`` does not cover the node set.
        SingularCovariance: If a covariance is singular.
    """
    terms = AutoregressiveTerms(states, tau)
    n_nodes = terms.data.shape[1]
    if partition.n_nodes != n_nodes:
        raise InvalidPartition(
            f"Partition covers {partition.n_nodes} nodes, data has {n_nodes}"
        )
    value = terms.phi_nats(partition) / _LN2
    logger.debug(f"phi_AR tau={tau} blocks={len(partition.blocks)} value={value:.6f}")
    return PhiResult(
        value=value,
        method="autoregressive",
        partition=partition.labelled(terms.labels),
        tau=tau,
        n_nodes=n_nodes,
        valid=validate_phi(value, n_nodes),
    )


def phi_atomic(states: SeriesInput, tau: int) -> PhiResult:
    """Auto-regressive phi with every node in its own block.

    Raises:
        InvalidPartition: If there are fewer than two nodes.
        SingularCovariance: If a covariance is singular.
    """
    data, _ = as_series(states)
    if data.shape[1] < 2:
        raise InvalidPartition("Atomic phi needs at least 2 nodes")
    result = phi_autoregressive(states, tau, Partition.atomic(data.shape[1]))
    return result.model_copy(update={"method": "atomic"})
