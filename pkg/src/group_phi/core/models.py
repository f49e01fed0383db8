"""Pydantic models for phi, sweep and regression results.

These are the structures written to JSON by the CLI, so they stay plain:
lists of floats and strings rather than arrays.
"""

from __future__ import annotations

import math
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from ..config.defaults import VALIDITY_TOLERANCE

PhiMethod = Literal["empirical", "autoregressive", "atomic"]


class PhiResult(BaseModel):
    """Phi value with the settings and corrections that produced it."""

    value: float = Field(..., description="Phi in bits")
    method: PhiMethod = Field(..., description="Estimator used")
    partition: list[list[str]] = Field(
        default_factory=list, description="Blocks of node labels the value refers to"
    )
    tau: int = Field(ge=1, description="Time delay in steps")
    n_nodes: int = Field(ge=0, description="Nodes surviving stability correction")
    dropped_nodes: list[str] = Field(
        default_factory=list, description="Labels removed by stability correction"
    )
    retries: int = Field(default=0, ge=0, description="Stability-correction iterations")
    valid: bool = Field(..., description="Whether the value lies in [0, n_nodes]")

    @model_validator(mode="after")
    def _check_consistency(self) -> PhiResult:
        if self.retries == 0 and self.dropped_nodes:
            raise ValueError("dropped_nodes must be empty when retries is 0")
        if self.valid and not (
            math.isfinite(self.value)
            and -VALIDITY_TOLERANCE <= self.value <= self.n_nodes
        ):
            raise ValueError(
                f"valid result must lie in [0, {self.n_nodes}], got {self.value}"
            )
        return self


class SweepResult(BaseModel):
    """Mean phi per value of a swept parameter (tau in steps or delta in ms)."""

    parameter: Literal["tau", "delta_ms"]
    parameter_values: list[float]
    mean_phi: list[float]
    stderr_phi: list[float]
    n_valid: list[int]
    argmax: float

    @model_validator(mode="after")
    def _check_lengths(self) -> SweepResult:
        lengths = {
            len(self.parameter_values),
            len(self.mean_phi),
            len(self.stderr_phi),
            len(self.n_valid),
        }
        if len(lengths) != 1:
            raise ValueError("Sweep columns must have equal length")
        if self.argmax not in self.parameter_values:
            raise ValueError(f"argmax {self.argmax} is not a swept value")
        return self

    @classmethod
    def from_points(
        cls,
        parameter: Literal["tau", "delta_ms"],
        parameter_values: list[float],
        mean_phi: list[float],
        stderr_phi: list[float],
        n_valid: list[int],
    ) -> SweepResult:
        """Build a result, picking the argmax over grid points with valid data.

        Ties go to the smallest parameter value.
        """
        best: Optional[tuple[float, float]] = None
        for value, mean in sorted(zip(parameter_values, mean_phi)):
            if math.isnan(mean):
                continue
            if best is None or mean > best[1]:
                best = (value, mean)
        if best is None:
            raise ValueError("No grid point has a finite mean phi")
        return cls(
            parameter=parameter,
            parameter_values=parameter_values,
            mean_phi=mean_phi,
            stderr_phi=stderr_phi,
            n_valid=n_valid,
            argmax=best[0],
        )


class RegressionFit(BaseModel):
    """Ordinary least squares estimates (point values only)."""

    names: list[str]
    coefficients: list[float]
    standard_errors: list[float]
    t_values: list[float]
    r_squared: float
    r_squared_adjusted: float
    residuals: list[float]
    n_observations: int

    @model_validator(mode="after")
    def _check_shapes(self) -> RegressionFit:
        if not (
            len(self.names)
            == len(self.coefficients)
            == len(self.standard_errors)
            == len(self.t_values)
        ):
            raise ValueError("One name, estimate and error per design column")
        if len(self.residuals) != self.n_observations:
            raise ValueError("One residual per observation")
        return self

    def coefficient(self, name: str) -> float:
        return self.coefficients[self.names.index(name)]

    def standard_error(self, name: str) -> float:
        return self.standard_errors[self.names.index(name)]


def validate_phi(value: float, n_nodes: int) -> bool:
    """Whether ``value`` is a possible phi for ``n_nodes`` binary nodes.

    Valid means finite and within ``[-1e-9, n_nodes]``.
    """
    return math.isfinite(value) and -VALIDITY_TOLERANCE <= value <= n_nodes
