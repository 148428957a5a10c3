"""Tests for kernels, bandwidths and the second-stage regressions."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from src.core.exceptions import (
    DegenerateSampleError,
    InvalidBandwidthError,
    SingularLocalDesignError,
)
from src.core.rng import child_generator
from src.services.smoothing import (
    GAUSSIAN,
    BandwidthRule,
    bandwidth,
    global_linear_regress,
    kde_at,
    kernel_weight,
    local_linear_regress,
    nw_regress,
    relative_weights,
)


@pytest.fixture
def outcomes() -> np.ndarray:
    return child_generator(17).normal(11.0, 1.5, size=300)


class TestBandwidth:
    """Tests for the rule-of-thumb bandwidth."""

    def test_silverman_rule(self, outcomes):
        expected = 0.9 * np.std(outcomes, ddof=1) * 300 ** (-0.2)
        assert bandwidth(BandwidthRule(), outcomes) == pytest.approx(expected)

    def test_named_exponents_parse(self):
        rule = BandwidthRule.from_label("1/4")
        assert rule.exponent == pytest.approx(0.25)
        assert rule.label == "1/4"
        assert BandwidthRule.from_label("0.3").label == "0.3"

    def test_exponent_outside_range(self):
        with pytest.raises(InvalidBandwidthError):
            BandwidthRule(exponent=0.1)
        with pytest.raises(InvalidBandwidthError):
            BandwidthRule(exponent=0.5)

    def test_unparseable_label(self):
        with pytest.raises(InvalidBandwidthError):
            BandwidthRule.from_label("one fifth")

    def test_quartic_root_rule(self):
        """sd 2, n = 16 and exponent 1/4 give 0.9 * 2 * 0.5."""
        y = np.repeat([-1.0, 1.0], 8) * 2.0 * math.sqrt(15.0 / 16.0)
        assert bandwidth(BandwidthRule(exponent=0.25), y) == pytest.approx(0.9)

    def test_constant_outcome(self):
        with pytest.raises(DegenerateSampleError):
            bandwidth(BandwidthRule(), np.full(10, 3.0))


class TestKernel:
    """Tests for kernel weights and the density estimate."""

    def test_gaussian_peak(self):
        assert kernel_weight(GAUSSIAN, 0.0, 1.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi))
        assert kernel_weight(GAUSSIAN, 0.0, 2.0) == pytest.approx(0.5 / math.sqrt(2.0 * math.pi))

    def test_one_bandwidth_away(self):
        assert kernel_weight(GAUSSIAN, 0.7, 0.7) == pytest.approx(stats.norm.pdf(1.0) / 0.7)

    def test_symmetric(self):
        rng = child_generator(21)
        u = rng.normal(scale=5.0, size=1000)
        for h in rng.uniform(0.01, 3.0, size=5):
            np.testing.assert_array_equal(kernel_weight(GAUSSIAN, u, h), kernel_weight(GAUSSIAN, -u, h))

    def test_kde_integrates_to_one(self, outcomes):
        h = bandwidth(BandwidthRule(), outcomes)
        grid = np.linspace(outcomes.min() - 10.0 * h, outcomes.max() + 10.0 * h, 4001)
        density = np.array([kde_at(outcomes, point, h) for point in grid])
        assert np.all(density >= 0)
        assert integrate.trapezoid(density, grid) == pytest.approx(1.0, abs=1e-3)

    def test_kde_standard_normal_peak(self):
        y = child_generator(5).standard_normal(100_000)
        h = bandwidth(BandwidthRule(), y)
        assert kde_at(y, 0.0, h) == pytest.approx(0.3989, abs=0.01)

    def test_non_positive_bandwidth(self):
        with pytest.raises(InvalidBandwidthError):
            kernel_weight(GAUSSIAN, 0.0, 0.0)

    def test_kde_near_true_density(self, outcomes):
        h = bandwidth(BandwidthRule(), outcomes)
        truth = 1.0 / (1.5 * math.sqrt(2.0 * math.pi))
        assert kde_at(outcomes, 11.0, h) == pytest.approx(truth, rel=0.3)

    def test_relative_weights_far_point(self):
        """Weights stay normalized even where absolute weights underflow."""
        w = relative_weights(np.array([0.0, 1.0]), 1000.0, 0.01, GAUSSIAN)
        assert w.max() == 1.0
        assert np.all(np.isfinite(w))


class TestRegressions:
    """Tests for the Nadaraya-Watson, local linear and global linear fits."""

    def test_nw_constant_is_exact(self, outcomes):
        responses = np.full(outcomes.size, 0.7)
        assert nw_regress(responses, outcomes, 11.0, 0.4) == 0.7

    def test_nw_is_convex_combination(self, outcomes):
        responses = child_generator(3).uniform(-2.0, 5.0, size=outcomes.size)
        value = nw_regress(responses, outcomes, 12.5, 0.3)
        assert responses.min() <= value <= responses.max()

    def test_nw_single_point_mass(self):
        """With one dominant neighbour the estimate is its response."""
        value = nw_regress([1.0, 5.0, 9.0], [0.0, 10.0, 20.0], 10.0, 0.1)
        assert value == pytest.approx(5.0)

    def test_local_linear_reproduces_lines(self, outcomes):
        responses = 1.0 + 2.0 * outcomes
        h = 0.5
        assert local_linear_regress(responses, outcomes, 11.0, h) == pytest.approx(23.0, abs=1e-9)

    def test_local_linear_literal_variant(self, outcomes):
        """literal=True adds the scaled slope times the evaluation point."""
        responses = 1.0 + 2.0 * outcomes
        h = 0.5
        value = local_linear_regress(responses, outcomes, 11.0, h, literal=True)
        assert value == pytest.approx(23.0 + 2.0 * h * 11.0, abs=1e-8)

    def test_local_linear_singular(self):
        with pytest.raises(SingularLocalDesignError):
            local_linear_regress([1.0, 2.0, 3.0], [4.0, 4.0, 4.0], 4.0, 1.0)

    def test_global_linear(self, outcomes):
        responses = 1.0 + 2.0 * outcomes
        assert global_linear_regress(responses, outcomes, 3.0) == pytest.approx(7.0, abs=1e-9)

    def test_global_linear_constant_outcome(self):
        with pytest.raises(SingularLocalDesignError):
            global_linear_regress([1.0, 2.0], [3.0, 3.0], 3.0)

    def test_misaligned_inputs(self):
        with pytest.raises(DegenerateSampleError):
            nw_regress([1.0, 2.0], [1.0, 2.0, 3.0], 1.0, 1.0)

    def test_nw_hand_evaluated(self):
        k0, k1 = stats.norm.pdf(0.0), stats.norm.pdf(1.0)
        expected = (k0 * 1.0 + k1 * 2.0) / (k0 + k1)
        assert nw_regress([1.0, 2.0], [0.0, 1.0], 0.0, 1.0) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(1.3776, abs=1e-4)

    def test_nw_ignores_weight_scale(self, outcomes):
        """The ratio is unchanged when every weight is multiplied by the same constant."""
        responses = child_generator(4).normal(size=outcomes.size)
        h = 0.4
        weights = kernel_weight(GAUSSIAN, outcomes - 11.5, h)
        value = nw_regress(responses, outcomes, 11.5, h)
        for c in (1e-6, 1.0, 250.0):
            scaled = c * weights
            assert value == pytest.approx(float(np.sum(scaled * responses) / np.sum(scaled)), abs=1e-12)

    def test_local_linear_matches_normal_equations(self):
        rng = child_generator(13)
        y = rng.normal(11.0, 1.5, size=50)
        responses = np.sin(y) + rng.normal(scale=0.3, size=50)
        point, h = 11.2, 0.6

        u = (y - point) / h
        w = stats.norm.pdf(u) / h
        design = np.column_stack([np.ones(50), u])
        a = np.linalg.solve(design.T @ (w[:, None] * design), design.T @ (w * responses))
        assert local_linear_regress(responses, y, point, h) == pytest.approx(a[0], abs=1e-10)

    def test_local_linear_and_nw_converge_as_h_shrinks(self):
        """On a smooth noise-free surface the gap between the two fits falls with h."""
        y = 11.0 + 1.5 * stats.norm.ppf((np.arange(4000) + 0.5) / 4000)
        responses = np.sin(y)
        gaps = [
            abs(local_linear_regress(responses, y, 12.0, h) - nw_regress(responses, y, 12.0, h))
            for h in (0.8, 0.4, 0.2, 0.1)
        ]
        assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))
        assert gaps[-1] < 0.01
