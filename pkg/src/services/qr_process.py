"""
Quantile regression process over a uniform grid, with crossing repair.
"""

import logging

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from ..core.exceptions import GridMismatchError, GridTooSmallError, UqpeError, stage_label
from ..core.parallel import ordered_map
from ..models import Dataset, QrFit, QuantileGrid, QuantileProcessFit
from .qr_core import fit_quantile

logger = logging.getLogger(__name__)

# Sample size -> grid size pairs used by the Monte Carlo designs
GRID_PAIRING: dict[int, int] = {250: 9, 500: 24, 2500: 99, 5000: 199}


def default_grid(m: int) -> QuantileGrid:
    """Levels eta_j = j / (m + 1), j = 1..m, with epsilon = 1 / (m + 1)."""
    if m < 3:
        raise GridTooSmallError(f"Grid needs m >= 3 levels, got {m}", {"m": m})
    levels = np.arange(1, m + 1, dtype=np.float64) / (m + 1)
    return QuantileGrid(m=m, levels=levels, epsilon=1.0 / (m + 1))


def default_m(n: int) -> int:
    """Library default grid size: 99 up to n = 2500, 199 above."""
    return 99 if n <= 2500 else 199


def paired_m(n: int) -> int:
    """Grid size of the nearest listed Monte Carlo sample size."""
    nearest = min(GRID_PAIRING, key=lambda size: (abs(size - n), size))
    return GRID_PAIRING[nearest]


def rearrange(curves: NDArray[np.float64]) -> tuple[NDArray[np.float64], int]:
    """Sort each row ascending; return the sorted curves and the crossing count.

    The count is the number of (row, j) pairs with curves[i, j + 1] < curves[i, j].
    """
    curves = np.asarray(curves, dtype=np.float64)
    crossings = int(np.count_nonzero(np.diff(curves, axis=1) < 0))
    if crossings == 0:
        return curves, 0
    return np.sort(curves, axis=1), crossings


def fit_process(
    data: Dataset, grid: QuantileGrid, threads: int | None = None
) -> QuantileProcessFit:
    """Fit beta(eta_j) for every grid level, in grid order."""

    def fit_level(eta: float) -> QrFit:
        try:
            return fit_quantile(data, float(eta))
        except UqpeError as exc:
            exc.details.setdefault("eta", float(eta))
            raise

    with stage_label("qr_process"):
        fits = ordered_map(fit_level, grid.levels, threads)

    betas = np.vstack([fit.beta for fit in fits])
    _, crossings = rearrange(data.x @ betas.T)
    if crossings:
        logger.warning(
            f"Repaired {crossings} quantile crossing(s) by monotone rearrangement"
        )
    logger.info(f"Fitted quantile process on m={grid.m} levels, n={data.n}")
    return QuantileProcessFit(
        grid=grid,
        betas=betas,
        crossing_count=crossings,
        rearranged=crossings > 0,
        target_index=data.target_index,
        column_names=data.column_names,
        objectives=np.array([fit.objective for fit in fits]),
        iterations=np.array([fit.iterations for fit in fits], dtype=np.int64),
        n=data.n,
    )


def evaluate_curves(
    fit: QuantileProcessFit, data: Dataset, *, rearranged: bool = True
) -> NDArray[np.float64]:
    """n x m matrix of fitted conditional quantiles x_i'beta(eta_j).

    Rows are monotone rearranged unless `rearranged=False`.
    """
    return evaluate_rows(fit, data.x, rearranged=rearranged)


def evaluate_rows(
    fit: QuantileProcessFit, x_rows: NDArray[np.float64], *, rearranged: bool = True
) -> NDArray[np.float64]:
    x_rows = np.atleast_2d(np.asarray(x_rows, dtype=np.float64))
    if x_rows.shape[1] != fit.d:
        raise GridMismatchError(
            f"Covariate rows have {x_rows.shape[1]} columns, the fit has {fit.d}"
        )
    curves = x_rows @ fit.betas.T
    if rearranged:
        curves, _ = rearrange(curves)
    return curves


def process_frame(fit: QuantileProcessFit) -> pd.DataFrame:
    """Coefficient process as a frame: one row per level, one column per coefficient."""
    frame = pd.DataFrame(fit.betas, columns=list(fit.column_names))
    frame.insert(0, "eta", fit.grid.levels)
    return frame
