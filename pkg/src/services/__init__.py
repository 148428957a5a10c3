"""
Services package.

Contains the numerical stages: ingestion, quantile regression, matching,
smoothing, UQPE estimation, RIF baselines, bootstrap inference and the
Monte Carlo harness.
"""

from .dataset_io import load_csv, write_csv
from .inference import pairwise_bootstrap, pairwise_bootstrap_many
from .matching import match_observations, match_points, oracle_xi_location_scale
from .qr_core import check_loss, fit_quantile, solve_quantile_regression, unconditional_quantile
from .qr_process import default_grid, evaluate_curves, fit_process, paired_m, rearrange
from .rif_baseline import compute_rif, rif_logit_uqpe, rif_ols_uqpe
from .simulation import draw_dgp, run_experiment, run_matching_experiment, true_uqpe
from .smoothing import (
    BandwidthRule,
    KernelSpec,
    bandwidth,
    global_linear_regress,
    kde_at,
    kernel_weight,
    local_linear_regress,
    nw_regress,
)
from .uqpe import UqpePipeline, cqpe_at, estimate_uqpe

__all__ = [
    # Data
    "load_csv",
    "write_csv",
    # Quantile regression
    "check_loss",
    "fit_quantile",
    "solve_quantile_regression",
    "unconditional_quantile",
    "default_grid",
    "fit_process",
    "evaluate_curves",
    "rearrange",
    "paired_m",
    # Matching
    "match_observations",
    "match_points",
    "oracle_xi_location_scale",
    # Smoothing
    "KernelSpec",
    "BandwidthRule",
    "bandwidth",
    "kernel_weight",
    "kde_at",
    "nw_regress",
    "local_linear_regress",
    "global_linear_regress",
    # Estimation
    "UqpePipeline",
    "estimate_uqpe",
    "cqpe_at",
    "compute_rif",
    "rif_ols_uqpe",
    "rif_logit_uqpe",
    # Inference
    "pairwise_bootstrap",
    "pairwise_bootstrap_many",
    # Simulation
    "draw_dgp",
    "true_uqpe",
    "run_experiment",
    "run_matching_experiment",
]
