"""
Monte Carlo designs, population oracles and the experiment runner.

Designs draw x ~ N(10, 1) and

    y = 1 [+ w] + x + (1 + theta x) u

with standardized u and an optional extra covariate w (independent N(10, 1)
or w = 10 + (x + z - 20) / sqrt(2) with independent z ~ N(10, 1)).

Ground truth for theta != 0 comes from a kernel-free band oracle: over a
large population draw, the conditional mean of the matched slope given
|y - Q_Y[tau]| <= delta is computed for shrinking delta and extrapolated.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from scipy import stats

from ..core.config import Config
from ..core.exceptions import OracleNotConvergedError, UqpeError, ValidationError
from ..core.parallel import ordered_map
from ..core.rng import child_generator, derive_seed
from ..models import (
    Dataset,
    DgpSpec,
    ErrorDistribution,
    ExtraCovariate,
    MatchingBand,
    RifVariant,
    SimulationCell,
    SimulationReport,
    SmoothingMethod,
)
from .distributions import SQRT2, draw_errors
from .inference import pairwise_bootstrap_many
from .matching import match_points, oracle_xi_location_scale
from .qr_core import unconditional_quantile
from .qr_process import default_grid, fit_process, paired_m
from .rif_baseline import rif_uqpe
from .smoothing import BandwidthRule, bandwidth
from .uqpe import UqpePipeline, validate_taus

logger = logging.getLogger(__name__)

ORACLE_CHUNK = 1_000_000
# Band half-width as a share of sd(Y), then halved twice
ORACLE_BAND = 0.1
ORACLE_SENSITIVITY = 0.005
# Lower end of the support of (chi2_1 - 1) / sqrt(2)
CHI2_SUPPORT_LOWER = -1.0 / SQRT2

Population = tuple[float, ErrorDistribution, ExtraCovariate]


def draw_population(
    population: Population, size: int, rng: np.random.Generator
) -> tuple[NDArray[np.float64], NDArray[np.float64] | None, NDArray[np.float64]]:
    """Draw (x, w, y); w is None without an extra covariate."""
    theta, u_dist, extra = population
    x = 10.0 + rng.standard_normal(size)
    w: NDArray[np.float64] | None = None
    if extra is ExtraCovariate.independent:
        w = 10.0 + rng.standard_normal(size)
    elif extra is ExtraCovariate.correlated:
        z = 10.0 + rng.standard_normal(size)
        w = 10.0 + (x + z - 20.0) / SQRT2
    u = draw_errors(u_dist, size, rng)
    y = 1.0 + x + (1.0 + theta * x) * u
    if w is not None:
        y = y + w
    return x, w, y


def draw_dgp(spec: DgpSpec) -> Dataset:
    """One sample of size spec.n from substream spec.seed."""
    x, w, y = draw_population(spec.population, spec.n, child_generator(spec.seed))
    if w is None:
        return Dataset.from_columns(y, x)
    return Dataset.from_columns(y, x, [w], control_names=["w"])


def _exact_normal_quantile(population: Population, tau: float) -> float | None:
    """Closed form Q_Y[tau] for the Gaussian location designs."""
    theta, u_dist, extra = population
    if theta != 0 or u_dist is not ErrorDistribution.normal:
        return None
    variance = {
        ExtraCovariate.none: 2.0,
        ExtraCovariate.independent: 3.0,
        ExtraCovariate.correlated: (1.0 + 1.0 / SQRT2) ** 2 + 0.5 + 1.0,
    }[extra]
    mean = 11.0 if extra is ExtraCovariate.none else 21.0
    return mean + math.sqrt(variance) * float(stats.norm.ppf(tau))


def _matched_slope_truth(
    population: Population,
    q: float,
    x: NDArray[np.float64],
    w: NDArray[np.float64] | None,
) -> NDArray[np.float64]:
    """beta_1(xi_tau(x, w)) = 1 + theta * Q_U(xi) with xi from the closed form."""
    theta, u_dist, _ = population
    alpha0 = 1.0 if w is None else 1.0 + w
    # Q_U(F_U(v)) = v on the support, so the standardized gap is the quantile
    v = (q - alpha0 - x) / (1.0 + theta * x)
    if u_dist is ErrorDistribution.chi2_standardized:
        v = np.maximum(v, CHI2_SUPPORT_LOWER)
    return 1.0 + theta * v


@dataclass(frozen=True)
class OracleValue:
    q_tau: float
    truth: float
    band_means: tuple[float, float, float]
    band_counts: tuple[int, int, int]


@lru_cache(maxsize=64)
def _band_oracle(population: Population, tau: float, draws: int, seed: int) -> OracleValue:
    chunks = [min(ORACLE_CHUNK, draws - start) for start in range(0, draws, ORACLE_CHUNK)]

    ys = np.empty(draws)
    offset = 0
    for k, size in enumerate(chunks):
        _, _, y = draw_population(population, size, child_generator(seed, k))
        ys[offset : offset + size] = y
        offset += size
    q = unconditional_quantile(ys, tau)
    delta0 = ORACLE_BAND * float(np.std(ys, ddof=1))
    del ys

    deltas = (delta0, delta0 / 2.0, delta0 / 4.0)
    sums = np.zeros(3)
    counts = np.zeros(3, dtype=np.int64)
    for k, size in enumerate(chunks):
        x, w, y = draw_population(population, size, child_generator(seed, k))
        gap = np.abs(y - q)
        near = gap <= delta0
        slopes = _matched_slope_truth(
            population, q, x[near], None if w is None else w[near]
        )
        for b, delta in enumerate(deltas):
            inside = gap[near] <= delta
            sums[b] += float(np.sum(slopes[inside]))
            counts[b] += int(np.count_nonzero(inside))

    if np.any(counts == 0):
        raise OracleNotConvergedError(
            "Oracle band is empty; increase the number of draws",
            {"counts": counts.tolist(), "tau": tau},
        )
    means = sums / counts
    drift = abs(means[2] - means[1])
    if drift > ORACLE_SENSITIVITY:
        raise OracleNotConvergedError(
            f"Oracle band sensitivity {drift:.4f} exceeds {ORACLE_SENSITIVITY}",
            {"tau": tau, "band_means": means.tolist()},
        )
    # Symmetric bands carry an O(delta^2) bias; extrapolate to delta = 0
    truth = float(means[2] + (means[2] - means[1]) / 3.0)
    logger.info(f"Band oracle tau={tau}: q={q:.6f}, truth={truth:.6f}")
    return OracleValue(
        q_tau=q,
        truth=truth,
        band_means=(float(means[0]), float(means[1]), float(means[2])),
        band_counts=(int(counts[0]), int(counts[1]), int(counts[2])),
    )


def _oracle(spec: DgpSpec, tau: float) -> OracleValue:
    validate_taus([tau])
    return _band_oracle(spec.population, round(float(tau), 12), Config.ORACLE_DRAWS, Config.ORACLE_SEED)


def unconditional_quantile_oracle(spec: DgpSpec, tau: float) -> float:
    """Population Q_Y[tau] of the design."""
    exact = _exact_normal_quantile(spec.population, tau)
    if exact is not None:
        return exact
    return _oracle(spec, tau).q_tau


def true_uqpe(spec: DgpSpec, tau: float) -> float:
    """Population UQPE of x at tau: exactly 1 when theta = 0."""
    if spec.theta == 0:
        return 1.0
    return _oracle(spec, tau).truth


# Experiment runner


@dataclass(frozen=True)
class EstimatorConfig:
    """One estimator evaluated in a Monte Carlo experiment."""

    name: str
    method: SmoothingMethod | None = None
    variant: RifVariant | None = None
    rule: BandwidthRule = field(default_factory=BandwidthRule)
    literal: bool = False

    @classmethod
    def parse(cls, label: str, rule: BandwidthRule | None = None) -> "EstimatorConfig":
        """Build from a label: nw, local-linear, global-linear, rif-ols-linear,
        rif-ols-quadratic, rif-ols-cubic or rif-logit."""
        rule = rule or BandwidthRule()
        text = label.strip().lower()
        if text.startswith("rif-"):
            try:
                variant = RifVariant(text.removeprefix("rif-"))
            except ValueError:
                raise ValidationError(f"Unknown estimator {label!r}") from None
            return cls(name=text, variant=variant, rule=rule)
        try:
            method = SmoothingMethod(text)
        except ValueError:
            raise ValidationError(f"Unknown estimator {label!r}") from None
        return cls(name=text, method=method, rule=rule)

    def with_rule(self, rule: BandwidthRule) -> "EstimatorConfig":
        return EstimatorConfig(
            name=f"{self.name}[h={rule.label}]",
            method=self.method,
            variant=self.variant,
            rule=rule,
            literal=self.literal,
        )


DEFAULT_ESTIMATORS = ("nw", "rif-ols-cubic", "rif-logit")


def evaluate_estimators(
    data: Dataset,
    estimators: Sequence[EstimatorConfig],
    taus: Sequence[float],
    m: int,
) -> dict[str, list[float] | UqpeError]:
    """Run every estimator at every tau on one dataset, sequentially."""
    results: dict[str, list[float] | UqpeError] = {}
    pipeline = UqpePipeline(data, default_grid(m), threads=1)
    for est in estimators:
        try:
            h = bandwidth(est.rule, data.y)
            if est.method is not None:
                values = [
                    pipeline.estimate(tau, h, est.method, literal=est.literal).estimate
                    for tau in taus
                ]
            else:
                assert est.variant is not None
                values = [rif_uqpe(data, tau, est.variant, h).estimate for tau in taus]
            results[est.name] = values
        except UqpeError as exc:
            results[est.name] = exc
    return results


@dataclass
class _Replication:
    design: int
    values: dict[str, list[float] | UqpeError]
    coverage: list[tuple[bool, bool]] | None = None
    coverage_error: UqpeError | None = None


def run_experiment(
    specs: Sequence[DgpSpec],
    sample_sizes: Sequence[int],
    estimators: Sequence[EstimatorConfig],
    taus: Sequence[float],
    reps: int,
    seed: int,
    *,
    grid_m: int | Callable[[int], int] = paired_m,
    coverage: bool = False,
    B: int = 100,
    alpha: float = 0.05,
    threads: int | None = None,
) -> SimulationReport:
    """
    Monte Carlo bias, variance and MSE of each estimator against the truth.

    Replication r of design s (one design per DgpSpec and sample size) draws its
    data from seed `derive_seed(seed, s, r)`. In coverage mode the first
    estimator is bootstrapped on every replication with seed
    `derive_seed(seed, s, r, 1)`.

    A cell whose failure share exceeds 1% marks the report invalid.
    """
    if reps < 2:
        raise ValidationError(f"Experiments need reps >= 2, got {reps}", {"reps": reps})
    if not estimators:
        raise ValidationError("At least one estimator is required")
    taus = sorted(validate_taus(taus))
    designs = [(spec, n) for spec in specs for n in sample_sizes]

    cells: dict[tuple[str, float, int], SimulationCell] = {}
    truths: dict[tuple[int, float], float] = {}
    for s, (spec, n) in enumerate(designs):
        for tau in taus:
            truths[(s, tau)] = true_uqpe(spec, tau)
            for est in estimators:
                key = (_cell_name(est, spec, specs), tau, n)
                cells[key] = SimulationCell(
                    estimator=key[0], tau=tau, n=n, truth=truths[(s, tau)]
                )

    def replicate(job: tuple[int, int]) -> _Replication:
        s, r = job
        spec, n = designs[s]
        m = grid_m(n) if callable(grid_m) else grid_m
        data = draw_dgp(spec.with_sample(n, derive_seed(seed, s, r)))
        result = _Replication(design=s, values=evaluate_estimators(data, estimators, taus, m))
        if coverage and not isinstance(result.values[estimators[0].name], UqpeError):
            primary = estimators[0]

            def statistic(sample: Dataset) -> NDArray[np.float64]:
                out = evaluate_estimators(sample, [primary], taus, m)[primary.name]
                if isinstance(out, UqpeError):
                    raise out
                return np.asarray(out)

            try:
                boots = pairwise_bootstrap_many(
                    data,
                    statistic,
                    B,
                    derive_seed(seed, s, r, 1),
                    alpha,
                    threads=1,
                    point=np.asarray(result.values[primary.name]),
                )
                result.coverage = [
                    boot.covers(truths[(s, tau)]) for boot, tau in zip(boots, taus, strict=True)
                ]
            except UqpeError as exc:
                result.coverage_error = exc
        return result

    jobs = [(s, r) for s in range(len(designs)) for r in range(reps)]
    logger.info(
        f"Running {len(jobs)} replications over {len(designs)} design(s), "
        f"{len(estimators)} estimator(s), coverage={'on' if coverage else 'off'}"
    )
    for rep in ordered_map(replicate, jobs, threads):
        spec, n = designs[rep.design]
        for k, est in enumerate(estimators):
            outcome = rep.values[est.name]
            for i, tau in enumerate(taus):
                cell = cells[(_cell_name(est, spec, specs), tau, n)]
                if isinstance(outcome, UqpeError):
                    cell.failures += 1
                    continue
                if coverage and k == 0 and rep.coverage_error is not None:
                    cell.failures += 1
                    continue
                cell.estimates.append(float(outcome[i]))
                if coverage and k == 0 and rep.coverage is not None:
                    gaussian, percentile = rep.coverage[i]
                    cell.covered += 1
                    cell.gaussian_hits += int(gaussian)
                    cell.percentile_hits += int(percentile)

    report = SimulationReport(
        cells=cells,
        reps=reps,
        seed=seed,
        config={
            "designs": [spec.label for spec in specs],
            "sample_sizes": list(sample_sizes),
            "estimators": [est.name for est in estimators],
            "taus": taus,
            "reps": reps,
            "seed": seed,
            "coverage": coverage,
            "B": B if coverage else None,
            "alpha": alpha,
        },
    )
    for cell in report.invalid_cells:
        logger.warning(
            f"Cell {cell.estimator} tau={cell.tau} n={cell.n}: "
            f"{cell.failures} of {cell.reps} replications failed"
        )
    return report


def _cell_name(est: EstimatorConfig, spec: DgpSpec, specs: Sequence[DgpSpec]) -> str:
    """Estimator name, prefixed with the design label when several designs run."""
    labels = {s.label for s in specs}
    return est.name if len(labels) <= 1 else f"{spec.label}:{est.name}"


def simulation_frame(report: SimulationReport) -> pd.DataFrame:
    rows = [
        {
            "estimator": cell.estimator,
            "tau": cell.tau,
            "n": cell.n,
            "bias": cell.bias,
            "variance": cell.variance,
            "mse": cell.mse,
        }
        for cell in report.ordered_cells()
    ]
    return pd.DataFrame(rows, columns=["estimator", "tau", "n", "bias", "variance", "mse"])


def coverage_frame(report: SimulationReport) -> pd.DataFrame:
    rows = [
        {
            "tau": cell.tau,
            "n": cell.n,
            "gaussian": cell.gaussian_coverage,
            "percentile": cell.percentile_coverage,
        }
        for cell in report.ordered_cells()
        if cell.covered
    ]
    return pd.DataFrame(rows, columns=["tau", "n", "gaussian", "percentile"])


# Matching-function experiment


def run_matching_experiment(
    spec: DgpSpec,
    taus: Sequence[float],
    reps: int,
    seed: int,
    x_grid: Sequence[float] | None = None,
    *,
    m: int | None = None,
    threads: int | None = None,
) -> list[MatchingBand]:
    """
    Estimated matching map against its closed form on a grid of x values.

    Rows with an extra covariate hold w at its mean of 10.
    """
    if reps < 2:
        raise ValidationError(f"Experiments need reps >= 2, got {reps}", {"reps": reps})
    taus = sorted(validate_taus(taus))
    xs = np.asarray(x_grid if x_grid is not None else np.linspace(8.0, 12.0, 41), dtype=np.float64)
    m = paired_m(spec.n) if m is None else m
    grid = default_grid(m)

    has_w = spec.extra_covariate is not ExtraCovariate.none
    rows = (
        np.column_stack([np.ones_like(xs), np.full_like(xs, 10.0), xs])
        if has_w
        else np.column_stack([np.ones_like(xs), xs])
    )
    alpha0 = 11.0 if has_w else 1.0
    truths = {
        tau: np.asarray(
            oracle_xi_location_scale(
                alpha0, 1.0, spec.theta, spec.u_dist, unconditional_quantile_oracle(spec, tau), xs
            )
        )
        for tau in taus
    }

    def replicate(r: int) -> NDArray[np.float64]:
        data = draw_dgp(spec.with_sample(spec.n, derive_seed(seed, 0, r)))
        fit = fit_process(data, grid, threads=1)
        return np.vstack(
            [match_points(fit, rows, unconditional_quantile(data.y, tau), tau).xi for tau in taus]
        )

    draws = np.stack(ordered_map(replicate, range(reps), threads))  # reps x taus x xs
    bands: list[MatchingBand] = []
    for t, tau in enumerate(taus):
        for k, x in enumerate(xs):
            sample = draws[:, t, k]
            truth = float(truths[tau][k])
            bands.append(
                MatchingBand(
                    tau=tau,
                    x=float(x),
                    xi_true=truth,
                    xi_mean=float(np.mean(sample)),
                    xi_lo=float(np.quantile(sample, 0.025)),
                    xi_hi=float(np.quantile(sample, 0.975)),
                    rmse=float(np.sqrt(np.mean((sample - truth) ** 2))),
                )
            )
    return bands


def matching_frame(bands: Sequence[MatchingBand]) -> pd.DataFrame:
    columns = ["tau", "x", "xi_true", "xi_mean", "xi_lo", "xi_hi"]
    return pd.DataFrame([{c: getattr(b, c) for c in columns} for b in bands], columns=columns)


def matching_rmse(bands: Sequence[MatchingBand]) -> dict[float, float]:
    """Root mean square error of the estimated map per tau, pooled over x."""
    out: dict[float, float] = {}
    for tau in sorted({b.tau for b in bands}):
        errors = [b.rmse**2 for b in bands if b.tau == tau]
        out[tau] = float(np.sqrt(np.mean(errors)))
    return out
