"""
Unit tests for entropy and mutual information over lagged pairs.
"""

import math

import numpy as np
import pytest

from group_phi.core.information import (
    Direction,
    code_entropy,
    code_mutual_information,
    conditional_entropy,
    entropy,
    joint_lag_distribution,
    mutual_information,
    pack_states,
)
from group_phi.core.state import StateMatrix, make_state_matrix
from group_phi.exceptions import EmptySubset, TauOutOfRange, UnnormalizedDistribution


class TestEntropy:
    """Test Shannon entropy."""

    def test_uniform(self):
        """Uniform over four outcomes is two bits."""
        assert entropy([0.25] * 4) == pytest.approx(2.0)

    def test_point_mass(self):
        """A certain outcome carries no information."""
        assert entropy({"a": 1.0, "b": 0.0}) == 0.0

    def test_mapping_input(self):
        """Mappings are read by value."""
        assert entropy({0: 0.5, 1: 0.5}) == pytest.approx(1.0)

    @pytest.mark.parametrize("dist", [[0.5, 0.6], [1.2, -0.2]])
    def test_unnormalized(self, dist):
        """Distributions must be non-negative and sum to one."""
        with pytest.raises(UnnormalizedDistribution):
            entropy(dist)


class TestPackStates:
    """Test bit packing of node subsets."""

    def test_bit_patterns(self):
        """Column j contributes bit j."""
        codes = pack_states(np.array([[0, 0], [1, 0], [0, 1], [1, 1]]))
        assert codes.tolist() == [0, 1, 2, 3]

    def test_wide_subsets_stay_unique(self):
        """Subsets wider than an int64 still get distinct codes per state."""
        rng = np.random.default_rng(0)
        columns = rng.integers(0, 2, size=(50, 70))
        columns[10] = columns[3]
        codes = pack_states(columns)

        assert codes[10] == codes[3]
        assert len(set(codes.tolist())) == len({tuple(row) for row in columns.tolist()})


class TestJointLagDistribution:
    """Test lagged joint distributions."""

    def test_weights(self, small_states: StateMatrix):
        """Each of the T - tau pairs weighs 1/(T - tau)."""
        joint = joint_lag_distribution(small_states, [0], 1)

        assert joint.sample_count == 5
        assert sum(joint.table.values()) == pytest.approx(1.0)
        # column a: 0 1 1 0 1 0 -> pairs (0,1) (1,1) (1,0) (0,1) (1,0)
        assert joint.table[(0, 1)] == pytest.approx(0.4)
        assert joint.table[(1, 0)] == pytest.approx(0.4)
        assert joint.table[(1, 1)] == pytest.approx(0.2)

    def test_tau_range(self, small_states: StateMatrix):
        """tau must lie in 1..T-1."""
        with pytest.raises(TauOutOfRange):
            joint_lag_distribution(small_states, [0], 0)
        with pytest.raises(TauOutOfRange):
            joint_lag_distribution(small_states, [0], small_states.n_steps)

    def test_empty_subset(self, small_states: StateMatrix):
        """At least one node is required."""
        with pytest.raises(EmptySubset):
            joint_lag_distribution(small_states, [], 1)

    def test_marginals(self, small_states: StateMatrix):
        """Marginals sum to one."""
        joint = joint_lag_distribution(small_states, [0, 1, 2], 2)
        assert sum(joint.past_marginal().values()) == pytest.approx(1.0)
        assert sum(joint.present_marginal().values()) == pytest.approx(1.0)


class TestMutualInformation:
    """Test mutual information and conditional entropy."""

    def test_copy_system(self, copy_states: StateMatrix):
        """A copied fair coin carries one bit across one step."""
        joint = joint_lag_distribution(copy_states, [0, 1], 1)
        assert mutual_information(joint) == pytest.approx(1.0, abs=0.01)

    def test_chain_rule(self, small_states: StateMatrix):
        """I(past; present) = H(past) - H(past | present)."""
        joint = joint_lag_distribution(small_states, [0, 1, 2], 1)
        h_past = entropy(joint.past_marginal())
        h_cond = conditional_entropy(joint, Direction.PAST_GIVEN_PRESENT)

        assert mutual_information(joint) == pytest.approx(h_past - h_cond)

    def test_direction_strings(self, small_states: StateMatrix):
        """Directions may be given by value."""
        joint = joint_lag_distribution(small_states, [0, 1], 1)
        h_present = entropy(joint.present_marginal())

        assert conditional_entropy(joint, "present-given-past") == pytest.approx(
            h_present - mutual_information(joint)
        )

    def test_independent_is_near_zero(self):
        """Independent coins share almost no information."""
        rng = np.random.default_rng(4)
        states = make_state_matrix(rng.integers(0, 2, size=(50_000, 2)), ["x", "y"])
        joint = joint_lag_distribution(states, [0, 1], 1)
        assert mutual_information(joint) < 0.01

    def test_noisy_copy_matches_analytic_values(self):
        """Plug-in estimates of a known two-node chain land within 0.02 bits."""
        rng = np.random.default_rng(12)
        n_steps, flip = 100_000, 0.1
        a = rng.integers(0, 2, size=n_steps)
        noise = (rng.random(n_steps) < flip).astype(int)
        b = np.concatenate([[0], a[:-1] ^ noise[1:]])
        states = make_state_matrix(np.column_stack([a, b]), ["A", "B"])
        joint = joint_lag_distribution(states, [0, 1], 1)

        h_flip = -(flip * math.log2(flip) + (1 - flip) * math.log2(1 - flip))
        assert mutual_information(joint) == pytest.approx(1.0 - h_flip, abs=0.02)
        assert entropy(joint.past_marginal()) == pytest.approx(2.0, abs=0.02)
        assert conditional_entropy(joint) == pytest.approx(1.0 + h_flip, abs=0.02)

    def test_code_functions_agree(self, small_states: StateMatrix):
        """Code-level estimators match the distribution-level ones."""
        codes = pack_states(small_states.values)
        joint = joint_lag_distribution(small_states, [0, 1, 2], 1)

        assert code_entropy(codes[:-1]) == pytest.approx(entropy(joint.past_marginal()))
        assert code_mutual_information(codes[:-1], codes[1:]) == pytest.approx(
            mutual_information(joint)
        )

    def test_binary_entropy_value(self):
        """Plug-in entropy of a 1/4 - 3/4 split."""
        codes = np.array([0, 0, 0, 1], dtype=np.int64)
        expected = -(0.25 * math.log2(0.25) + 0.75 * math.log2(0.75))
        assert code_entropy(codes) == pytest.approx(expected)
