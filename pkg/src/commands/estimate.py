"""`estimate` command: UQPE per tau with baselines and bootstrap inference."""

import logging
import time
from dataclasses import dataclass

import click
import numpy as np
from numpy.typing import NDArray

from ..core.config import Config
from ..core.exceptions import ValidationError, stage_label
from ..models import (
    Command,
    CqpeEstimate,
    Dataset,
    QuantileGrid,
    RifEstimate,
    RifVariant,
    SmoothingMethod,
    UqpeEstimate,
)
from ..schemas import ESTIMATE_COLUMNS, CqpeRecord, EstimateRecord, RifRecord, RunConfig, UqpeRecord
from ..services.dataset_io import load_csv
from ..services.inference import pairwise_bootstrap_many
from ..services.qr_process import default_grid, paired_m
from ..services.rif_baseline import rif_uqpe
from ..services.smoothing import BandwidthRule, bandwidth
from ..services.uqpe import UqpePipeline
from ..utils import format_duration, parse_float_list, records_frame, split_list
from .common import data_options, handle_errors, output_options, write_output

logger = logging.getLogger(__name__)

ALL_BASELINES = [f"rif-{v.value}" for v in RifVariant]


@dataclass
class EstimationPlan:
    """Everything estimated on one sample, in a fixed order."""

    taus: list[float]
    grid: QuantileGrid
    rule: BandwidthRule
    methods: list[SmoothingMethod]
    baselines: list[RifVariant]
    cqr: bool
    literal: bool

    def run(
        self, data: Dataset, threads: int | None = 1
    ) -> tuple[list[UqpeEstimate], list[RifEstimate], list[CqpeEstimate]]:
        pipeline = UqpePipeline(data, self.grid, threads=threads)
        uqpe = [
            est
            for method in self.methods
            for est in pipeline.estimate_many(self.taus, self.rule, method, literal=self.literal)
        ]
        rif: list[RifEstimate] = []
        if self.baselines:
            h = bandwidth(self.rule, data.y)
            rif = [rif_uqpe(data, tau, v, h) for v in self.baselines for tau in self.taus]
        cqpe = [pipeline.cqpe(tau) for tau in self.taus] if self.cqr else []
        return uqpe, rif, cqpe

    def statistic(self, data: Dataset) -> NDArray[np.float64]:
        uqpe, rif, cqpe = self.run(data)
        return np.array([e.estimate for e in [*uqpe, *rif, *cqpe]], dtype=np.float64)


def parse_baselines(text: str) -> list[RifVariant]:
    labels = ALL_BASELINES if text.strip().lower() == "all" else split_list(text.lower())
    variants = []
    for label in labels:
        try:
            variants.append(RifVariant(label.removeprefix("rif-")))
        except ValueError:
            raise ValidationError(
                f"Unknown baseline {label!r}; choose from {', '.join(ALL_BASELINES)} or all"
            ) from None
    return variants


@click.command("estimate")
@data_options
@click.option("--tau", "taus", default="0.1,0.25,0.5,0.75,0.9", show_default=True, help="Quantile levels")
@click.option("--grid", type=int, default=None, help="Grid size m (default paired with n)")
@click.option(
    "--method",
    "methods",
    multiple=True,
    type=click.Choice([m.value for m in SmoothingMethod]),
    help="Second-stage smoother, repeatable (default nw)",
)
@click.option("--literal", is_flag=True, help="Local linear returns a0 + a1 * q instead of a0")
@click.option("--baselines", default="", help="RIF baselines: rif-ols-linear, rif-ols-quadratic, rif-ols-cubic, rif-logit or all")
@click.option("--cqr", is_flag=True, help="Also report the conditional quantile slope at each tau")
@click.option("--bandwidth-exponent", default="1/5", show_default=True)
@click.option("--bandwidth-constant", type=float, default=0.9, show_default=True)
@click.option("--bootstrap", type=int, default=200, show_default=True, help="Bootstrap replicates, 0 disables")
@click.option("--alpha", type=float, default=0.05, show_default=True)
@output_options
@handle_errors(Command.estimate.value)
def estimate_command(
    data_path: str,
    outcome: str,
    target: str,
    controls: str,
    drop_na: bool,
    taus: str,
    grid: int | None,
    methods: tuple[str, ...],
    literal: bool,
    baselines: str,
    cqr: bool,
    bandwidth_exponent: str,
    bandwidth_constant: float,
    bootstrap: int,
    alpha: float,
    seed: int | None,
    threads: int | None,
    output_format: str,
    output: str | None,
) -> None:
    """Estimate unconditional quantile partial effects from a CSV file."""
    started = time.perf_counter()
    config = RunConfig(
        command=Command.estimate,
        data=data_path,
        outcome=outcome,
        target=target,
        controls=split_list(controls),
        drop_na=drop_na,
        taus=parse_float_list(taus, "tau"),
        grid=grid,
        methods=list(methods) or [SmoothingMethod.nw],
        baselines=[f"rif-{v.value}" for v in parse_baselines(baselines)],
        cqr=cqr,
        literal=literal,
        bandwidth_constant=bandwidth_constant,
        bandwidth_exponent=bandwidth_exponent,
        bootstrap=bootstrap,
        alpha=alpha,
        seed=Config.DEFAULT_SEED if seed is None else seed,
        threads=Config.THREADS if threads is None else threads,
        format=output_format,
        output=output,
    )

    with stage_label("dataset"):
        data = load_csv(config.data, config.outcome, config.target, config.controls, drop_na=config.drop_na)
    config = config.model_copy(update={"grid": config.grid or paired_m(data.n)})

    plan = EstimationPlan(
        taus=config.taus,
        grid=default_grid(config.grid),
        rule=BandwidthRule.from_label(config.bandwidth_exponent, config.bandwidth_constant),
        methods=[SmoothingMethod(m) for m in config.methods],
        baselines=parse_baselines(",".join(config.baselines)),
        cqr=config.cqr,
        literal=config.literal,
    )
    uqpe, rif, cqpe = plan.run(data, threads=config.threads)
    point = np.array([e.estimate for e in [*uqpe, *rif, *cqpe]], dtype=np.float64)

    boots = [None] * point.size
    if config.bootstrap:
        logger.info(f"Bootstrapping {point.size} statistic(s) with B={config.bootstrap}")
        boots = pairwise_bootstrap_many(
            data,
            plan.statistic,
            config.bootstrap,
            config.seed,
            config.alpha,
            threads=config.threads,
            point=point,
        )

    records: list[EstimateRecord] = []
    for k, est in enumerate([*uqpe, *rif, *cqpe]):
        if isinstance(est, UqpeEstimate):
            records.append(UqpeRecord.from_estimate(est, boots[k]))
        elif isinstance(est, RifEstimate):
            records.append(RifRecord.from_estimate(est, boots[k]))
        else:
            records.append(CqpeRecord.from_estimate(est, boots[k]))

    frame = records_frame([r.csv_row() for r in records], ESTIMATE_COLUMNS)
    write_output(config, records, frame)
    logger.info(f"estimate finished in {format_duration(time.perf_counter() - started)}")
