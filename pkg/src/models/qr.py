"""Quantile regression fits and the quantile grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..core.exceptions import GridMismatchError, GridTooSmallError, InvalidLevelError

# Relative tolerance used when checking that grid spacing is uniform
UNIFORM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class QrFit:
    """A single linear quantile regression fit at level `eta`."""

    eta: float
    beta: NDArray[np.float64]
    objective: float
    iterations: int
    converged: bool
    solver: str = "frisch-newton"

    def __post_init__(self) -> None:
        if not 0.0 < self.eta < 1.0:
            raise InvalidLevelError(f"eta must lie in (0, 1), got {self.eta}")
        beta = np.asarray(self.beta, dtype=np.float64)
        beta.setflags(write=False)
        object.__setattr__(self, "beta", beta)


@dataclass(frozen=True, eq=False)
class QuantileGrid:
    """Uniform grid of quantile levels eta_1 < ... < eta_m inside [eps, 1 - eps]."""

    m: int
    levels: NDArray[np.float64]
    epsilon: float

    def __post_init__(self) -> None:
        levels = np.asarray(self.levels, dtype=np.float64)
        levels.setflags(write=False)
        object.__setattr__(self, "levels", levels)

        if self.m < 3:
            raise GridTooSmallError(f"Grid needs m >= 3 levels, got {self.m}", {"m": self.m})
        if levels.shape != (self.m,):
            raise GridMismatchError(f"Expected {self.m} levels, got {levels.size}")
        if not 0.0 < self.epsilon < 0.5:
            raise InvalidLevelError(f"epsilon must lie in (0, 1/2), got {self.epsilon}")
        steps = np.diff(levels)
        if np.any(steps <= 0):
            raise InvalidLevelError("Grid levels must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=UNIFORM_TOL, atol=UNIFORM_TOL):
            raise InvalidLevelError("Grid levels must be uniformly spaced")
        slack = UNIFORM_TOL
        if levels[0] < self.epsilon - slack or levels[-1] > 1.0 - self.epsilon + slack:
            raise InvalidLevelError(
                f"Grid levels must lie in [{self.epsilon}, {1.0 - self.epsilon}]"
            )

    @property
    def step(self) -> float:
        return float(self.levels[1] - self.levels[0])

    @property
    def lower(self) -> float:
        return float(self.levels[0])

    @property
    def upper(self) -> float:
        return float(self.levels[-1])

    def nearest_index(self, eta: float) -> int:
        return int(np.argmin(np.abs(self.levels - eta)))


@dataclass(frozen=True, eq=False)
class QuantileProcessFit:
    """Coefficient process over a grid: row j of `betas` is beta(eta_j).

    `crossing_count` counts (observation, j) pairs whose raw fitted quantiles
    decreased from j to j + 1 on the fitting sample.
    """

    grid: QuantileGrid
    betas: NDArray[np.float64]
    crossing_count: int
    rearranged: bool
    target_index: int
    column_names: tuple[str, ...]
    objectives: NDArray[np.float64]
    iterations: NDArray[np.int64]
    n: int

    def __post_init__(self) -> None:
        betas = np.asarray(self.betas, dtype=np.float64)
        betas.setflags(write=False)
        object.__setattr__(self, "betas", betas)
        if betas.shape != (self.grid.m, len(self.column_names)):
            raise GridMismatchError(
                f"betas has shape {betas.shape}, expected "
                f"({self.grid.m}, {len(self.column_names)})"
            )

    @property
    def d(self) -> int:
        return int(self.betas.shape[1])

    @property
    def target_slopes(self) -> NDArray[np.float64]:
        """beta_1(eta_j) for every grid level."""
        return self.betas[:, self.target_index]
