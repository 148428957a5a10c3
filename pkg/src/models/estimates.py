"""Point estimates and bootstrap results."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .base import RifVariant, SmoothingMethod


@dataclass(frozen=True)
class UqpeEstimate:
    tau: float
    estimate: float
    method: SmoothingMethod
    q_tau: float
    bandwidth: float
    grid_m: int
    boundary_hits: int
    n: int
    literal: bool = False


@dataclass(frozen=True)
class RifEstimate:
    tau: float
    estimate: float
    variant: RifVariant
    density_at_q: float
    q_tau: float
    bandwidth: float
    n: int


@dataclass(frozen=True)
class CqpeEstimate:
    """Conditional quantile slope beta_1 at the grid row nearest `eta`."""

    eta: float
    grid_eta: float
    estimate: float
    grid_m: int
    n: int


@dataclass(frozen=True, eq=False)
class BootstrapResult:
    point: float
    replicates: NDArray[np.float64]
    se: float
    gaussian_ci: tuple[float, float]
    percentile_ci: tuple[float, float]
    B: int
    seed: int
    alpha: float = 0.05
    retries: int = 0

    def covers(self, value: float) -> tuple[bool, bool]:
        """Whether `value` lies in the Gaussian and percentile intervals."""
        g_lo, g_hi = self.gaussian_ci
        p_lo, p_hi = self.percentile_ci
        return g_lo <= value <= g_hi, p_lo <= value <= p_hi
