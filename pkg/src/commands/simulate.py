"""`simulate` command: Monte Carlo accuracy, coverage and matching experiments."""

import logging
import time

import click

from ..core.config import Config
from ..core.exceptions import ReportInvalidError
from ..models import DGP_PRESETS, Command, DgpSpec
from ..schemas import SIMULATION_TAUS, CoverageRow, MatchingRow, RunConfig, SimulationRow
from ..services.qr_process import paired_m
from ..services.simulation import (
    DEFAULT_ESTIMATORS,
    EstimatorConfig,
    coverage_frame,
    matching_frame,
    matching_rmse,
    run_experiment,
    run_matching_experiment,
    simulation_frame,
)
from ..services.smoothing import NAMED_EXPONENTS, BandwidthRule
from ..utils import format_duration, parse_float_list, parse_int_list, split_list
from .common import handle_errors, output_options, write_output

logger = logging.getLogger(__name__)


def build_estimators(labels: list[str], rule: BandwidthRule, sweep: bool) -> list[EstimatorConfig]:
    estimators = [EstimatorConfig.parse(label, rule) for label in labels]
    if not sweep:
        return estimators
    swept: list[EstimatorConfig] = []
    for est in estimators:
        if est.method is None:
            swept.append(est)
            continue
        swept.extend(
            est.with_rule(BandwidthRule(constant=rule.constant, exponent=a)) for a in NAMED_EXPONENTS
        )
    return swept


@click.command("simulate")
@click.option(
    "--dgp",
    "dgps",
    default="loc-normal",
    show_default=True,
    help=f"Comma-separated designs: {', '.join(DGP_PRESETS)}",
)
@click.option("--n", "sample_sizes", default="500", show_default=True, help="Comma-separated sample sizes")
@click.option("--reps", type=int, default=200, show_default=True)
@click.option("--tau", "taus", default="0.25,0.5,0.75", show_default=True)
@click.option("--estimators", default=",".join(DEFAULT_ESTIMATORS), show_default=True)
@click.option("--grid", type=int, default=None, help="Fixed grid size m (default paired with n)")
@click.option("--bandwidth-exponent", default="1/5", show_default=True)
@click.option("--bandwidth-constant", type=float, default=0.9, show_default=True)
@click.option("--sweep-bandwidth", is_flag=True, help="Run UQPE estimators under exponents 1/4, 1/5 and 1/6")
@click.option("--coverage", is_flag=True, help="Bootstrap the first estimator and report CI coverage")
@click.option("--B", "--bootstrap", "B", type=int, default=100, show_default=True, help="Replicates in coverage mode")
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--matching", is_flag=True, help="Estimated matching map against its closed form")
@output_options
@handle_errors(Command.simulate.value)
def simulate_command(
    dgps: str,
    sample_sizes: str,
    reps: int,
    taus: str,
    estimators: str,
    grid: int | None,
    bandwidth_exponent: str,
    bandwidth_constant: float,
    sweep_bandwidth: bool,
    coverage: bool,
    B: int,
    alpha: float,
    matching: bool,
    seed: int | None,
    threads: int | None,
    output_format: str,
    output: str | None,
) -> None:
    """Run Monte Carlo experiments on the built-in designs."""
    started = time.perf_counter()
    config = RunConfig(
        command=Command.simulate,
        dgps=split_list(dgps),
        sample_sizes=parse_int_list(sample_sizes, "n"),
        reps=reps,
        taus=parse_float_list(taus, "tau") or list(SIMULATION_TAUS),
        estimators=split_list(estimators.lower()),
        grid=grid,
        bandwidth_exponent=bandwidth_exponent,
        bandwidth_constant=bandwidth_constant,
        sweep_bandwidth=sweep_bandwidth,
        coverage=coverage,
        bootstrap=B if coverage else 0,
        alpha=alpha,
        matching=matching,
        seed=Config.DEFAULT_SEED if seed is None else seed,
        threads=Config.THREADS if threads is None else threads,
        format=output_format,
        output=output,
    )
    specs = [DgpSpec.preset(name) for name in config.dgps]

    if config.matching:
        spec = specs[0].with_sample(config.sample_sizes[0], 0)
        bands = run_matching_experiment(
            spec, config.taus, reps, config.seed, m=config.grid, threads=config.threads
        )
        for tau, rmse in matching_rmse(bands).items():
            logger.info(f"Matching map tau={tau}: RMSE {rmse:.4f}")
        write_output(config, [MatchingRow.from_band(b) for b in bands], matching_frame(bands))
        return

    rule = BandwidthRule.from_label(config.bandwidth_exponent, config.bandwidth_constant)
    report = run_experiment(
        specs,
        config.sample_sizes,
        build_estimators(config.estimators, rule, config.sweep_bandwidth),
        config.taus,
        reps,
        config.seed,
        grid_m=config.grid or paired_m,
        coverage=config.coverage,
        B=B,
        alpha=config.alpha,
        threads=config.threads,
    )
    logger.info(f"simulate finished in {format_duration(time.perf_counter() - started)}")

    if config.coverage:
        cells = [cell for cell in report.ordered_cells() if cell.covered]
        write_output(config, [CoverageRow.from_cell(c) for c in cells], coverage_frame(report))
    else:
        cells = report.ordered_cells()
        write_output(config, [SimulationRow.from_cell(c) for c in cells], simulation_frame(report))

    if not report.valid:
        worst = max(report.invalid_cells, key=lambda c: c.failure_share)
        raise ReportInvalidError(
            f"{len(report.invalid_cells)} cell(s) exceed the 1% failure share "
            f"(worst: {worst.estimator} tau={worst.tau} n={worst.n}, "
            f"{worst.failures}/{worst.reps})",
            {"stage": "simulation"},
        )
