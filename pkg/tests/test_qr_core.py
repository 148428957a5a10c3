"""Tests for the check loss, sample quantiles and the quantile regression solver."""

import itertools

import numpy as np
import pytest

from src.core.exceptions import InvalidLevelError, RankDeficientDesignError
from src.core.rng import child_generator
from src.services.qr_core import (
    check_loss,
    fit_quantile,
    mean_check_loss,
    solve_quantile_regression,
    unconditional_quantile,
)


def brute_force_objective(y: np.ndarray, x: np.ndarray, eta: float) -> float:
    """Smallest mean check loss over every basic solution (lines through two points)."""
    best = np.inf
    for i, j in itertools.combinations(range(len(y)), 2):
        rows = x[[i, j]]
        if abs(np.linalg.det(rows)) < 1e-12:
            continue
        beta = np.linalg.solve(rows, y[[i, j]])
        best = min(best, mean_check_loss(y - x @ beta, eta))
    return best


class TestCheckLoss:
    """Tests for rho_tau."""

    def test_asymmetric_weights(self):
        assert check_loss(2.0, 0.25) == pytest.approx(0.5)
        assert check_loss(-2.0, 0.25) == pytest.approx(1.5)
        assert check_loss(0.0, 0.7) == 0.0

    def test_vectorized(self):
        np.testing.assert_allclose(check_loss(np.array([-1.0, 1.0]), 0.5), [0.5, 0.5])

    def test_level_outside_unit_interval(self):
        with pytest.raises(InvalidLevelError):
            check_loss(1.0, 1.0)


class TestUnconditionalQuantile:
    """Sample quantile is the order statistic of rank ceil(n tau)."""

    @pytest.mark.parametrize("tau,expected", [(0.1, 1.0), (0.25, 3.0), (0.5, 5.0), (0.9, 9.0)])
    def test_order_statistic(self, tau, expected):
        y = np.array([7.0, 1.0, 10.0, 3.0, 5.0, 2.0, 9.0, 4.0, 6.0, 8.0])
        assert unconditional_quantile(y, tau) == expected

    def test_small_tau_uses_minimum(self):
        assert unconditional_quantile([4.0, 2.0, 3.0], 0.01) == 2.0

    def test_minimizes_check_loss(self):
        """The returned value minimizes the empirical check loss."""
        y = child_generator(1).standard_normal(101)
        q = unconditional_quantile(y, 0.3)
        losses = [mean_check_loss(y - c, 0.3) for c in y]
        assert mean_check_loss(y - q, 0.3) == pytest.approx(min(losses), abs=1e-12)


class TestSolver:
    """Tests for solve_quantile_regression."""

    def test_matches_brute_force_oracle(self):
        """Objective equals the best basic solution on 50 small random fixtures."""
        for k in range(50):
            rng = child_generator(2024, k)
            n = int(rng.integers(4, 9))
            x = np.column_stack([np.ones(n), rng.normal(size=n)])
            y = 1.0 + 2.0 * x[:, 1] + rng.standard_t(3, size=n)
            eta = float(rng.uniform(0.1, 0.9))

            fit = solve_quantile_regression(y, x, eta)
            assert fit.objective <= brute_force_objective(y, x, eta) + 1e-8

    def test_exact_line_recovered(self, line_dataset):
        """Noise-free data give the generating coefficients at every level."""
        for eta in (0.1, 0.5, 0.9):
            fit = fit_quantile(line_dataset, eta)
            np.testing.assert_allclose(fit.beta, [2.0, 1.0], atol=1e-10)
            assert fit.converged

    def test_intercept_only_is_sample_quantile(self):
        """With an intercept-only design the fit is a sample eta-quantile."""
        y = child_generator(9).normal(size=41)
        fit = solve_quantile_regression(y, np.ones((41, 1)), 0.5)
        assert fit.objective == pytest.approx(mean_check_loss(y - np.median(y), 0.5), abs=1e-10)

    def test_rank_deficient_design(self):
        x = np.column_stack([np.ones(6), np.arange(6.0), 2 * np.arange(6.0)])
        with pytest.raises(RankDeficientDesignError) as exc_info:
            solve_quantile_regression(np.arange(6.0), x, 0.5)
        assert exc_info.value.exit_code == 3

    def test_invalid_level(self, line_dataset):
        with pytest.raises(InvalidLevelError):
            fit_quantile(line_dataset, 0.0)

    def test_ill_conditioned_design_uses_lp_fallback(self):
        """Condition numbers above the limit go to the HiGHS solver."""
        rng = child_generator(4)
        x1 = rng.normal(size=30)
        x = np.column_stack([np.ones(30), x1, x1 + 1e-11 * rng.normal(size=30)])
        y = 1.0 + x1 + rng.normal(size=30)
        fit = solve_quantile_regression(y, x, 0.5)
        assert fit.solver == "highs"

    @pytest.mark.parametrize(
        "y", [[1.0, 2.0, 3.0, 4.0], [4.0, 3.0, 2.0, 1.0], [3.0, 1.0, 4.0, 2.0]]
    )
    def test_tied_minimizer_takes_lower_endpoint(self, y):
        """Any b in [2, 3] is optimal; the fit returns 2 whatever the row order."""
        y = np.array(y)
        fit = solve_quantile_regression(y, np.ones((4, 1)), 0.5)
        assert fit.beta[0] == pytest.approx(2.0, abs=1e-10)
        assert fit.beta[0] == pytest.approx(unconditional_quantile(y, 0.5), abs=1e-10)

    @pytest.mark.parametrize("tau", [0.2, 0.4, 0.5, 0.8])
    def test_intercept_only_matches_order_statistic_with_ties(self, tau):
        """Groups of four equal values make 0.2, 0.4 and 0.8 fall between groups."""
        y = child_generator(8).permutation(np.repeat(np.arange(1.0, 6.0), 4))
        fit = solve_quantile_regression(y, np.ones((20, 1)), tau)
        assert fit.beta[0] == pytest.approx(unconditional_quantile(y, tau), abs=1e-10)


class TestOptimality:
    """Optimality and equivariance of the fitted coefficients."""

    LEVELS = (0.05, 0.25, 0.5, 0.9)

    def test_objective_beats_random_candidates(self, control_dataset):
        data = control_dataset
        rng = child_generator(31)
        for eta in self.LEVELS:
            fit = fit_quantile(data, eta)
            near = fit.beta + rng.normal(scale=0.5, size=(500, data.x.shape[1]))
            wide = rng.uniform(-20.0, 20.0, size=(500, data.x.shape[1]))
            for beta in np.vstack([near, wide]):
                assert fit.objective <= mean_check_loss(data.y - data.x @ beta, eta) + 1e-12

    def test_subgradient_is_small(self, control_dataset):
        """At most d residuals sit at zero, so the subgradient is O(d max|x| / n)."""
        data = control_dataset
        n, d = data.x.shape
        bound = d * float(np.max(np.abs(data.x))) / n + 1e-6
        for eta in self.LEVELS:
            beta = fit_quantile(data, eta).beta
            below = data.y <= data.x @ beta
            gradient = ((eta - below)[:, None] * data.x).mean(axis=0)
            assert np.all(np.abs(gradient) <= bound)

    def test_equivariant_under_linear_shift(self, control_dataset):
        data = control_dataset
        shift = np.array([1.5, -0.5, 2.0])
        for eta in self.LEVELS:
            base = solve_quantile_regression(data.y, data.x, eta)
            moved = solve_quantile_regression(data.y + data.x @ shift, data.x, eta)
            np.testing.assert_allclose(moved.beta, base.beta + shift, atol=1e-6)


class TestQuantileMonotonicity:
    def test_nondecreasing_in_tau(self):
        y = child_generator(12).standard_t(4, size=257)
        values = [unconditional_quantile(y, tau) for tau in np.linspace(0.01, 0.99, 99)]
        assert np.all(np.diff(values) >= 0)

    def test_normal_lower_quartile(self):
        y = child_generator(7).standard_normal(10_000)
        assert unconditional_quantile(y, 0.25) == pytest.approx(-0.674, abs=0.05)
