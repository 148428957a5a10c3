"""
Pairwise bootstrap inference.

Replicate b resamples n rows with replacement from substream (b,) of the
master seed; a failed replicate is retried once on substream (b, 1). Results
are stored by replicate index, so they do not depend on the thread count.
"""

import logging
import math
from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from ..core.exceptions import ReplicateFailureError, UqpeError, ValidationError, stage_label
from ..core.parallel import ordered_map
from ..core.rng import child_generator
from ..models import BootstrapResult, Dataset

logger = logging.getLogger(__name__)

RANK_EPS = 1e-9

Estimator = Callable[[Dataset], float]
VectorEstimator = Callable[[Dataset], NDArray[np.float64]]


def resample_indices(n: int, seed: int, *key: int) -> NDArray[np.intp]:
    """Row indices of one pairwise resample drawn from substream `key`."""
    rng = child_generator(seed, *key)
    return rng.integers(0, n, size=n).astype(np.intp)


def critical_value(alpha: float) -> float:
    """Two-sided normal critical value rounded to two decimals (1.96 at alpha = 0.05)."""
    return round(float(stats.norm.ppf(1.0 - alpha / 2.0)), 2)


def percentile_ranks(B: int, alpha: float) -> tuple[int, int]:
    """1-based order statistic ranks ceil(alpha/2 B) and ceil((1 - alpha/2) B)."""
    lo = math.ceil(alpha / 2.0 * B - RANK_EPS)
    hi = math.ceil((1.0 - alpha / 2.0) * B - RANK_EPS)
    return min(max(lo, 1), B), min(max(hi, 1), B)


def _validate(B: int, alpha: float) -> None:
    if B < 2:
        raise ValidationError(f"Bootstrap needs B >= 2 replicates, got {B}", {"B": B})
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}", {"alpha": alpha})


def _run_replicate(
    data: Dataset, estimator: VectorEstimator, seed: int, b: int
) -> tuple[NDArray[np.float64], int]:
    try:
        return estimator(data.resample(resample_indices(data.n, seed, b))), 0
    except UqpeError as first:
        logger.info(f"Bootstrap replicate {b} failed ({first.code}); retrying once")
    try:
        return estimator(data.resample(resample_indices(data.n, seed, b, 1))), 1
    except UqpeError as second:
        raise ReplicateFailureError(b, second) from second


def summarize(
    point: float,
    replicates: NDArray[np.float64],
    seed: int,
    alpha: float = 0.05,
    retries: int = 0,
) -> BootstrapResult:
    B = replicates.size
    se = float(np.std(replicates, ddof=0))
    z = critical_value(alpha)
    ordered = np.sort(replicates)
    lo, hi = percentile_ranks(B, alpha)
    return BootstrapResult(
        point=point,
        replicates=replicates,
        se=se,
        gaussian_ci=(point - z * se, point + z * se),
        percentile_ci=(float(ordered[lo - 1]), float(ordered[hi - 1])),
        B=B,
        seed=seed,
        alpha=alpha,
        retries=retries,
    )


def pairwise_bootstrap_many(
    data: Dataset,
    estimator: VectorEstimator,
    B: int,
    seed: int,
    alpha: float = 0.05,
    *,
    threads: int | None = None,
    point: NDArray[np.float64] | None = None,
) -> list[BootstrapResult]:
    """Bootstrap a vector of statistics computed jointly on each resample."""
    _validate(B, alpha)
    with stage_label("inference"):
        if point is None:
            point = np.asarray(estimator(data), dtype=np.float64)
        point = np.atleast_1d(np.asarray(point, dtype=np.float64))

        outcomes = ordered_map(
            lambda b: _run_replicate(data, estimator, seed, b), range(B), threads
        )
    matrix = np.vstack([np.atleast_1d(np.asarray(v, dtype=np.float64)) for v, _ in outcomes])
    retries = sum(r for _, r in outcomes)
    if retries:
        logger.warning(f"{retries} of {B} bootstrap replicate(s) needed a retry")
    return [
        summarize(float(point[k]), matrix[:, k].copy(), seed, alpha, retries)
        for k in range(point.size)
    ]


def pairwise_bootstrap(
    data: Dataset,
    estimator: Estimator,
    B: int,
    seed: int,
    alpha: float = 0.05,
    *,
    threads: int | None = None,
) -> BootstrapResult:
    """
    Pairwise bootstrap of a scalar estimator.

    Args:
        data: Original sample
        estimator: Maps a dataset to a scalar estimate
        B: Number of replicates (>= 2)
        seed: Master seed for the replicate substreams
        alpha: One minus the confidence level

    Raises:
        ReplicateFailureError: a replicate failed on both of its substreams
    """
    (result,) = pairwise_bootstrap_many(
        data,
        lambda sample: np.array([estimator(sample)]),
        B,
        seed,
        alpha,
        threads=threads,
    )
    return result
