"""Tests for the Monte Carlo designs, oracles and experiment runner."""

import math

import numpy as np
import pytest
from scipy import stats

from src.core.config import Config
from src.core.exceptions import InvalidDatasetError, OracleNotConvergedError, ValidationError
from src.core.rng import child_generator
from src.models import DgpSpec, ErrorDistribution, ExtraCovariate, SimulationCell, SmoothingMethod
from src.services.simulation import (
    EstimatorConfig,
    coverage_frame,
    draw_dgp,
    draw_population,
    matching_frame,
    matching_rmse,
    run_experiment,
    run_matching_experiment,
    simulation_frame,
    true_uqpe,
    unconditional_quantile_oracle,
)
from src.services.smoothing import BandwidthRule


class TestDesigns:
    """Tests for DGP specs and sample draws."""

    def test_presets(self):
        spec = DgpSpec.preset("locscale-chi2", n=250, seed=4)
        assert spec.theta == 1.0
        assert spec.u_dist is ErrorDistribution.chi2_standardized
        assert spec.label == "locscale-chi2"
        assert DgpSpec.preset("locscale-normal-wcorr").extra_covariate is ExtraCovariate.correlated

    def test_unknown_preset(self):
        with pytest.raises(InvalidDatasetError):
            DgpSpec.preset("probit")

    def test_minimum_sample_size(self):
        with pytest.raises(InvalidDatasetError):
            DgpSpec(n=5)

    def test_draw_is_reproducible(self):
        a = draw_dgp(DgpSpec(n=50, seed=8))
        b = draw_dgp(DgpSpec(n=50, seed=8))
        np.testing.assert_array_equal(a.y, b.y)
        assert not np.array_equal(a.y, draw_dgp(DgpSpec(n=50, seed=9)).y)

    def test_extra_covariate_column(self, control_dataset):
        assert control_dataset.column_names == ("intercept", "w", "x")
        assert control_dataset.target_name == "x"

    def test_population_moments(self):
        """The location design has mean 11 and variance 2."""
        _, w, y = draw_population((0.0, ErrorDistribution.normal, ExtraCovariate.none), 200_000, child_generator(1))
        assert w is None
        assert np.mean(y) == pytest.approx(11.0, abs=0.02)
        assert np.var(y) == pytest.approx(2.0, abs=0.03)

    def test_chi2_errors_standardized(self):
        _, _, y = draw_population(
            (0.0, ErrorDistribution.chi2_standardized, ExtraCovariate.none), 200_000, child_generator(2)
        )
        assert np.mean(y) == pytest.approx(11.0, abs=0.02)
        assert np.var(y) == pytest.approx(2.0, abs=0.05)


class TestOracles:
    """Population quantiles and true UQPEs."""

    def test_location_truth_is_one(self):
        assert true_uqpe(DgpSpec(), 0.25) == 1.0

    @pytest.mark.parametrize(
        "extra,mean,variance",
        [
            (ExtraCovariate.none, 11.0, 2.0),
            (ExtraCovariate.independent, 21.0, 3.0),
        ],
    )
    def test_exact_normal_quantile(self, extra, mean, variance):
        spec = DgpSpec(extra_covariate=extra)
        expected = mean + math.sqrt(variance) * stats.norm.ppf(0.75)
        assert unconditional_quantile_oracle(spec, 0.75) == pytest.approx(expected)

    def test_small_population_is_rejected(self, monkeypatch):
        """Too few draws leave the band means unstable."""
        monkeypatch.setattr(Config, "ORACLE_DRAWS", 1000)
        with pytest.raises(OracleNotConvergedError):
            true_uqpe(DgpSpec.preset("locscale-normal"), 0.5)

    @pytest.mark.slow
    def test_location_scale_truth(self):
        """For theta = 1 the truth lies between the extreme conditional slopes."""
        truth = true_uqpe(DgpSpec.preset("locscale-normal"), 0.5)
        assert 0.5 < truth < 1.5


class TestEstimatorConfig:
    """Parsing estimator labels."""

    def test_parse(self):
        assert EstimatorConfig.parse("nw").method is SmoothingMethod.nw
        assert EstimatorConfig.parse("RIF-Logit").variant is not None

    def test_unknown(self):
        with pytest.raises(ValidationError):
            EstimatorConfig.parse("probit")

    def test_with_rule(self):
        est = EstimatorConfig.parse("nw").with_rule(BandwidthRule(exponent=0.25))
        assert est.name == "nw[h=1/4]"


class TestSimulationCell:
    """Cell summaries."""

    def test_mse_decomposition(self):
        cell = SimulationCell(estimator="nw", tau=0.5, n=100, truth=1.0, estimates=[0.8, 1.1, 1.3, 0.95])
        assert cell.mse == pytest.approx(cell.bias**2 + cell.variance, abs=1e-12)

    def test_failure_share_invalidates(self):
        cell = SimulationCell(estimator="nw", tau=0.5, n=100, truth=1.0, estimates=[1.0] * 50, failures=1)
        assert cell.failure_share > 0.01
        assert not cell.valid


class TestRunExperiment:
    """Small end-to-end experiments."""

    def run(self, threads=1, **kwargs):
        return run_experiment(
            [DgpSpec()],
            [200],
            [EstimatorConfig.parse("nw"), EstimatorConfig.parse("rif-ols-linear")],
            [0.5],
            reps=3,
            seed=1,
            grid_m=9,
            threads=threads,
            **kwargs,
        )

    def test_cells_and_frame(self):
        report = self.run()
        assert report.valid
        assert len(report.cells) == 2
        cell = report.cell("nw", 0.5, 200)
        assert cell.reps == 3
        assert cell.truth == 1.0
        frame = simulation_frame(report)
        assert list(frame.columns) == ["estimator", "tau", "n", "bias", "variance", "mse"]
        assert list(frame["estimator"]) == ["nw", "rif-ols-linear"]

    def test_reproducible_across_threads(self):
        one = self.run(threads=1)
        two = self.run(threads=2)
        assert one.cell("nw", 0.5, 200).estimates == two.cell("nw", 0.5, 200).estimates

    def test_coverage_mode(self):
        report = self.run(coverage=True, B=5)
        cell = report.cell("nw", 0.5, 200)
        assert cell.covered == 3
        frame = coverage_frame(report)
        assert list(frame.columns) == ["tau", "n", "gaussian", "percentile"]
        assert len(frame) == 1

    def test_reps_validated(self):
        with pytest.raises(ValidationError):
            run_experiment([DgpSpec()], [200], [EstimatorConfig.parse("nw")], [0.5], reps=1, seed=1)

    def test_several_designs_prefix_names(self):
        """Cells carry the design label when more than one design runs."""
        report = run_experiment(
            [DgpSpec(), DgpSpec(extra_covariate=ExtraCovariate.independent)],
            [100],
            [EstimatorConfig.parse("rif-ols-linear")],
            [0.5],
            reps=2,
            seed=3,
            grid_m=9,
            threads=1,
        )
        names = sorted(cell.estimator for cell in report.ordered_cells())
        assert names == ["loc-normal-w:rif-ols-linear", "loc-normal:rif-ols-linear"]


class TestMatchingExperiment:
    """Estimated matching map against the closed form."""

    def test_bands(self):
        bands = run_matching_experiment(DgpSpec(n=200), [0.5], reps=2, seed=5, x_grid=[9.0, 10.0, 11.0], m=9, threads=1)
        assert len(bands) == 3
        middle = bands[1]
        assert middle.x == 10.0
        assert middle.xi_true == pytest.approx(0.5)
        assert middle.xi_lo <= middle.xi_mean <= middle.xi_hi
        frame = matching_frame(bands)
        assert list(frame.columns) == ["tau", "x", "xi_true", "xi_mean", "xi_lo", "xi_hi"]
        assert set(matching_rmse(bands)) == {0.5}
