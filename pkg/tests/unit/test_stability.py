"""
Unit tests for validity checks, stability correction and result models.
"""

import logging
import math

import numpy as np
import pytest
from pydantic import ValidationError

from group_phi.core.models import PhiResult, RegressionFit, SweepResult, validate_phi
from group_phi.core.stability import averaged_phi, stabilized_phi, uncorrected_phi
from group_phi.core.state import StateMatrix, make_state_matrix
from group_phi.exceptions import ExhaustedNodes, NoValidResults
from group_phi.utils import synthetic


def _result(value: float, valid: bool = True, n_nodes: int = 4) -> PhiResult:
    return PhiResult(value=value, method="atomic", tau=1, n_nodes=n_nodes, valid=valid)


class TestValidatePhi:
    """Test the validity range."""

    @pytest.mark.parametrize(
        "value,expected",
        [
            (0.0, True),
            (-5e-10, True),
            (3.0, True),
            (-1e-6, False),
            (3.5, False),
            (math.nan, False),
            (math.inf, False),
        ],
    )
    def test_range(self, value, expected):
        """Phi must be finite and within [0, N] up to a small tolerance."""
        assert validate_phi(value, 3) is expected


class TestStabilizedPhi:
    """Test the stability correction loop."""

    def test_valid_first_try(self, copy_states: StateMatrix):
        """A valid value is returned without retries."""
        result = stabilized_phi(copy_states, 1, method="empirical")

        assert result.valid
        assert result.retries == 0
        assert result.dropped_nodes == []
        assert result.value == pytest.approx(1.0, abs=0.01)

    def test_drops_constant_nodes(self):
        """Constant columns are dropped one per retry, lowest index first."""
        states = synthetic.coupled_ring(17, 5000, seed=0, n_constant=3)
        result = stabilized_phi(states, 1, method="atomic")

        assert result.valid
        assert result.dropped_nodes == ["const0", "const1", "const2"]
        assert result.retries == 3
        assert result.n_nodes == 17
        assert 0.0 <= result.value <= 17

    def test_drop_fraction(self):
        """With a larger fraction several nodes go per retry."""
        states = synthetic.coupled_ring(17, 5000, seed=0, n_constant=3)
        result = stabilized_phi(states, 1, method="atomic", drop_fraction=0.15)

        assert result.retries == 1
        assert set(result.dropped_nodes) == {"const0", "const1", "const2"}

    def test_exhausted(self):
        """Two constant nodes can never give a valid value."""
        states = make_state_matrix(np.zeros((50, 2)), ["x", "y"])
        with pytest.raises(ExhaustedNodes):
            stabilized_phi(states, 1, method="atomic")

    @pytest.mark.parametrize("n_nodes", [2, 7, 20, 40])
    def test_retries_bounded(self, n_nodes: int, caplog):
        """Even when no subset is ever valid the loop stops within the retry bound."""
        states = make_state_matrix(
            np.zeros((50, n_nodes)), [f"n{i}" for i in range(n_nodes)]
        )
        bound = math.ceil(math.log(n_nodes) / math.log(1 / 0.95)) + n_nodes

        with caplog.at_level(logging.WARNING, logger="group_phi.core.stability"):
            with pytest.raises(ExhaustedNodes):
                stabilized_phi(states, 1, method="atomic")

        retries = sum("Stability correction" in r.getMessage() for r in caplog.records)
        assert 1 <= retries <= bound

    def test_uncorrected_keeps_all_nodes(self, copy_states: StateMatrix):
        """The uncorrected value never drops nodes."""
        result = uncorrected_phi(copy_states, 1, method="empirical")

        assert result.n_nodes == 2
        assert result.retries == 0
        assert result.valid


class TestAveragedPhi:
    """Test averaging over replicates."""

    def test_mean_and_stderr(self):
        """Invalid results are ignored; stderr uses ddof=1."""
        results = [_result(1.0), _result(2.0), _result(3.0), _result(-2.0, valid=False)]
        average = averaged_phi(results)

        assert average.mean == pytest.approx(2.0)
        assert average.stderr == pytest.approx(1.0 / math.sqrt(3))
        assert average.n_valid == 3

    def test_single_value(self):
        """One valid value has zero standard error."""
        assert averaged_phi([_result(1.5)]).stderr == 0.0

    def test_no_valid_results(self):
        """Averaging nothing valid is an error."""
        with pytest.raises(NoValidResults):
            averaged_phi([_result(-1.0, valid=False)])


class TestResultModels:
    """Test result model invariants."""

    def test_dropped_nodes_need_retries(self):
        """Dropped nodes imply at least one retry."""
        with pytest.raises(ValidationError):
            PhiResult(
                value=1.0, method="atomic", tau=1, n_nodes=3,
                dropped_nodes=["x"], retries=0, valid=True,
            )

    def test_valid_value_in_range(self):
        """A result flagged valid must lie in [0, n_nodes]."""
        with pytest.raises(ValidationError):
            _result(5.0, valid=True, n_nodes=4)

    def test_sweep_argmax_ignores_nan(self):
        """The argmax skips grid points without data."""
        sweep = SweepResult.from_points(
            "tau", [1, 2, 3], [0.2, math.nan, 0.1], [0.0, math.nan, 0.0], [2, 0, 2]
        )
        assert sweep.argmax == 1

    def test_sweep_argmax_ties_to_smallest(self):
        """Equal maxima resolve to the smallest parameter value."""
        sweep = SweepResult.from_points(
            "delta_ms", [200.0, 50.0, 100.0], [0.4, 0.4, 0.1], [0, 0, 0], [1, 1, 1]
        )
        assert sweep.argmax == 50.0

    def test_sweep_all_nan(self):
        """A sweep without any finite mean has no argmax."""
        with pytest.raises(ValueError):
            SweepResult.from_points("tau", [1], [math.nan], [math.nan], [0])

    def test_regression_lookup(self):
        """Coefficients are looked up by design column name."""
        fit = RegressionFit(
            names=["intercept", "x"],
            coefficients=[1.0, 2.0],
            standard_errors=[0.1, 0.2],
            t_values=[10.0, 10.0],
            r_squared=0.9,
            r_squared_adjusted=0.85,
            residuals=[0.0, 0.1, -0.1],
            n_observations=3,
        )
        assert fit.coefficient("x") == 2.0
        assert fit.standard_error("intercept") == 0.1
