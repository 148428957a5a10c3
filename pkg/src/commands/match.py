"""`match` command: per-observation matched levels and slopes."""

import logging

import click
import numpy as np
from numpy.typing import NDArray

from ..core.config import Config
from ..core.exceptions import stage_label
from ..models import Command, Dataset, QuantileGrid
from ..schemas import MatchRow, RunConfig
from ..services.dataset_io import load_csv
from ..services.inference import pairwise_bootstrap_many
from ..services.matching import match_observations, match_points
from ..services.qr_core import unconditional_quantile
from ..services.qr_process import default_grid, fit_process, paired_m, process_frame
from ..utils import emit, parse_float_list, records_frame, render_csv, split_list
from .common import data_options, handle_errors, output_options, write_output

logger = logging.getLogger(__name__)

MATCH_COLUMNS = ["tau", "row", "x_target", "xi", "matched_slope", "branch"]
BAND_COLUMNS = ["slope_lo", "slope_hi"]


def matched_slopes(
    sample: Dataset, rows: NDArray[np.float64], grid: QuantileGrid, taus: list[float]
) -> NDArray[np.float64]:
    """Matched slopes of fixed covariate rows under a refit on `sample`, stacked over tau."""
    fit = fit_process(sample, grid, threads=1)
    return np.concatenate(
        [match_points(fit, rows, unconditional_quantile(sample.y, tau), tau).matched_slope for tau in taus]
    )


@click.command("match")
@data_options
@click.option("--tau", "taus", default="0.1,0.25,0.5,0.75,0.9", show_default=True, help="Quantile levels")
@click.option("--grid", type=int, default=None, help="Grid size m (default paired with n)")
@click.option("--raw", is_flag=True, help="Match on unrearranged curves (diagnostic)")
@click.option("--bootstrap", type=int, default=0, show_default=True, help="Replicates for matched-slope bands, 0 disables")
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option(
    "--process-output",
    type=click.Path(dir_okay=False),
    default=None,
    help="Also write the coefficient process (eta, coefficients) as CSV",
)
@output_options
@handle_errors(Command.match.value)
def match_command(
    data_path: str,
    outcome: str,
    target: str,
    controls: str,
    drop_na: bool,
    taus: str,
    grid: int | None,
    raw: bool,
    bootstrap: int,
    alpha: float,
    process_output: str | None,
    seed: int | None,
    threads: int | None,
    output_format: str,
    output: str | None,
) -> None:
    """Export the estimated matching function for every observation."""
    config = RunConfig(
        command=Command.match,
        data=data_path,
        outcome=outcome,
        target=target,
        controls=split_list(controls),
        drop_na=drop_na,
        taus=parse_float_list(taus, "tau"),
        grid=grid,
        raw=raw,
        bootstrap=bootstrap,
        alpha=alpha,
        process_output=process_output,
        seed=Config.DEFAULT_SEED if seed is None else seed,
        threads=Config.THREADS if threads is None else threads,
        format=output_format,
        output=output,
    )
    with stage_label("dataset"):
        data = load_csv(config.data, config.outcome, config.target, config.controls, drop_na=config.drop_na)
    config = config.model_copy(update={"grid": config.grid or paired_m(data.n)})
    quantile_grid = default_grid(config.grid)

    fit = fit_process(data, quantile_grid, config.threads)
    if config.process_output:
        emit(render_csv(process_frame(fit), config.echo()), config.process_output)
    results = [match_observations(fit, data, tau, raw=config.raw) for tau in config.taus]

    bands: list[tuple[list[float], list[float]] | None] = [None] * len(results)
    if config.bootstrap:
        boots = pairwise_bootstrap_many(
            data,
            lambda sample: matched_slopes(sample, data.x, quantile_grid, config.taus),
            config.bootstrap,
            config.seed,
            config.alpha,
            threads=config.threads,
            point=np.concatenate([r.matched_slope for r in results]),
        )
        for t in range(len(results)):
            chunk = boots[t * data.n : (t + 1) * data.n]
            bands[t] = ([b.percentile_ci[0] for b in chunk], [b.percentile_ci[1] for b in chunk])

    x_target = data.target.tolist()
    rows = [
        row
        for result, band in zip(results, bands, strict=True)
        for row in MatchRow.from_result(result, x_target, band)
    ]
    columns = MATCH_COLUMNS + (BAND_COLUMNS if config.bootstrap else [])
    frame = records_frame([r.model_dump(include=set(columns)) for r in rows], columns)
    write_output(config, rows, frame)
