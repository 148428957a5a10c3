"""Standardized error laws used by the simulation designs and oracles."""

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import stats

from ..models import ErrorDistribution

SQRT2 = float(np.sqrt(2.0))


def error_cdf(dist: ErrorDistribution, t: ArrayLike) -> NDArray[np.float64]:
    t = np.asarray(t, dtype=np.float64)
    if dist is ErrorDistribution.normal:
        return stats.norm.cdf(t)
    return stats.chi2.cdf(1.0 + SQRT2 * t, df=1)


def draw_errors(
    dist: ErrorDistribution, size: int, rng: np.random.Generator
) -> NDArray[np.float64]:
    """Mean zero, unit variance draws."""
    if dist is ErrorDistribution.normal:
        return rng.standard_normal(size)
    return (rng.chisquare(1.0, size) - 1.0) / SQRT2
