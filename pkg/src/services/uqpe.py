"""
Unconditional quantile partial effect estimation.

The pipeline fits the quantile process and evaluates the rearranged curves
once; every tau then only needs the sample quantile, the matching step and
a second-stage smoothing of the matched slopes on y at that quantile.
"""

import logging
from collections.abc import Sequence
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

from ..core.exceptions import (
    InvalidLevelError,
    InvariantViolationError,
    OutOfGridRangeError,
    SingularLocalDesignError,
    stage_label,
)
from ..core.parallel import ordered_map
from ..models import (
    CqpeEstimate,
    Dataset,
    MatchResult,
    QuantileGrid,
    QuantileProcessFit,
    SmoothingMethod,
    UqpeEstimate,
)
from .matching import match_observations
from .qr_process import default_grid, default_m, evaluate_curves, fit_process
from .smoothing import (
    GAUSSIAN,
    BandwidthRule,
    KernelSpec,
    bandwidth,
    global_linear_regress,
    local_linear_regress,
    nw_regress,
)

logger = logging.getLogger(__name__)

# Absolute slack on the convex-combination bound of the NW estimate
BOUND_SLACK = 1e-12
GRID_SLACK = 1e-12


def validate_taus(taus: Sequence[float]) -> list[float]:
    values = [float(t) for t in taus]
    if not values:
        raise InvalidLevelError("At least one tau is required")
    bad = [t for t in values if not 0.0 < t < 1.0]
    if bad:
        raise InvalidLevelError(f"Every tau must lie in (0, 1); got {bad}", {"taus": bad})
    return values


class UqpePipeline:
    """Shared first stage for UQPE estimation on one dataset."""

    def __init__(
        self,
        data: Dataset,
        grid: QuantileGrid | None = None,
        *,
        threads: int | None = None,
    ):
        self.data = data
        self.grid = grid if grid is not None else default_grid(default_m(data.n))
        self.threads = threads

    @cached_property
    def fit(self) -> QuantileProcessFit:
        return fit_process(self.data, self.grid, self.threads)

    @cached_property
    def curves(self) -> NDArray[np.float64]:
        return evaluate_curves(self.fit, self.data)

    def match(self, tau: float) -> MatchResult:
        return match_observations(self.fit, self.data, tau, curves=self.curves)

    def estimate(
        self,
        tau: float,
        h: float,
        method: SmoothingMethod = SmoothingMethod.nw,
        spec: KernelSpec = GAUSSIAN,
        *,
        literal: bool = False,
    ) -> UqpeEstimate:
        matched = self.match(tau)
        with stage_label("smoothing"):
            value, used = _smooth(matched, self.data.y, h, method, spec, literal)
        if used is SmoothingMethod.nw:
            lo, hi = matched.slope_range()
            if not lo - BOUND_SLACK <= value <= hi + BOUND_SLACK:
                raise InvariantViolationError(
                    f"NW estimate {value} outside matched slope range [{lo}, {hi}]",
                    {"stage": "uqpe", "tau": tau},
                )
        return UqpeEstimate(
            tau=tau,
            estimate=value,
            method=used,
            q_tau=matched.q_tau,
            bandwidth=h,
            grid_m=self.grid.m,
            boundary_hits=matched.boundary_hits,
            n=self.data.n,
            literal=literal and used is SmoothingMethod.local_linear,
        )

    def estimate_many(
        self,
        taus: Sequence[float],
        rule: BandwidthRule | None = None,
        method: SmoothingMethod = SmoothingMethod.nw,
        spec: KernelSpec = GAUSSIAN,
        *,
        literal: bool = False,
    ) -> list[UqpeEstimate]:
        taus = sorted(validate_taus(taus))
        with stage_label("smoothing"):
            h = bandwidth(rule or BandwidthRule(), self.data.y)
        # Materialize the shared stage before fanning out over tau
        _ = self.curves
        return ordered_map(
            lambda tau: self.estimate(tau, h, method, spec, literal=literal),
            taus,
            self.threads,
        )

    def cqpe(self, eta: float) -> CqpeEstimate:
        value = cqpe_at(self.fit, eta)
        return CqpeEstimate(
            eta=eta,
            grid_eta=float(self.grid.levels[self.grid.nearest_index(eta)]),
            estimate=value,
            grid_m=self.grid.m,
            n=self.data.n,
        )


def _smooth(
    matched: MatchResult,
    y: NDArray[np.float64],
    h: float,
    method: SmoothingMethod,
    spec: KernelSpec,
    literal: bool,
) -> tuple[float, SmoothingMethod]:
    slopes, q = matched.matched_slope, matched.q_tau
    if method is SmoothingMethod.global_linear:
        return global_linear_regress(slopes, y, q), method
    if method is SmoothingMethod.local_linear:
        try:
            return local_linear_regress(slopes, y, q, h, spec, literal=literal), method
        except SingularLocalDesignError:
            logger.warning(
                f"tau={matched.tau}: local linear design singular; falling back to NW"
            )
    return nw_regress(slopes, y, q, h, spec), SmoothingMethod.nw


def estimate_uqpe(
    data: Dataset,
    taus: Sequence[float],
    grid: QuantileGrid | None = None,
    rule: BandwidthRule | None = None,
    method: SmoothingMethod = SmoothingMethod.nw,
    *,
    spec: KernelSpec = GAUSSIAN,
    literal: bool = False,
    threads: int | None = None,
) -> list[UqpeEstimate]:
    """UQPE of the target covariate at every tau, sorted by tau."""
    with stage_label("uqpe"):
        pipeline = UqpePipeline(data, grid, threads=threads)
        return pipeline.estimate_many(taus, rule, method, spec, literal=literal)


def cqpe_at(fit: QuantileProcessFit, eta: float) -> float:
    """Target slope at the grid row nearest `eta`."""
    grid = fit.grid
    if not grid.lower - GRID_SLACK <= eta <= grid.upper + GRID_SLACK:
        raise OutOfGridRangeError(
            f"eta={eta} outside the grid range [{grid.lower}, {grid.upper}]",
            {"eta": eta, "stage": "uqpe"},
        )
    return float(fit.target_slopes[grid.nearest_index(eta)])
