"""
Matching of conditional quantile curves to the unconditional quantile.

For observation i with monotone curve c_i(eta_1) <= ... <= c_i(eta_m) and the
sample quantile q = Q_Y[tau]:

    below     q < c_i(eta_1)               xi = epsilon, slope row 1
    interior  c_i(eta_j) <= q < c_i(eta_j+1)  xi = eta_j
    above     c_i(eta_m) <= q              xi = eta_m

No interpolation between grid levels is performed.
"""

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.config import Config
from ..core.exceptions import GridMismatchError, ScaleNonPositiveError, stage_label
from ..models import Dataset, ErrorDistribution, MatchBranch, MatchResult, QuantileProcessFit
from .distributions import error_cdf
from .qr_core import unconditional_quantile
from .qr_process import evaluate_curves, evaluate_rows

logger = logging.getLogger(__name__)


def match_observations(
    fit: QuantileProcessFit,
    data: Dataset,
    tau: float,
    *,
    curves: NDArray[np.float64] | None = None,
    raw: bool = False,
) -> MatchResult:
    """Matched level and slope for every observation of the fitting sample."""
    with stage_label("matching"):
        if fit.n != data.n or fit.d != data.d:
            raise GridMismatchError(
                f"Fit was computed on n={fit.n}, d={fit.d} but data has n={data.n}, d={data.d}",
                {"fit_n": fit.n, "data_n": data.n},
            )
        q_tau = unconditional_quantile(data.y, tau)
        if curves is None:
            curves = evaluate_curves(fit, data, rearranged=not raw)
        result = match_curves(fit, curves, q_tau, tau, raw=raw)

    share = result.boundary_share
    if share > Config.BOUNDARY_WARN:
        logger.warning(
            f"tau={tau}: {result.boundary_hits} of {result.n} observations "
            f"({share:.1%}) clamped to the grid boundary; consider a finer or wider grid"
        )
    return result


def match_points(
    fit: QuantileProcessFit,
    x_rows: ArrayLike,
    q_tau: float,
    tau: float = float("nan"),
) -> MatchResult:
    """Match arbitrary covariate rows against a fitted process at quantile `q_tau`."""
    curves = evaluate_rows(fit, np.asarray(x_rows, dtype=np.float64))
    return match_curves(fit, curves, q_tau, tau)


def match_curves(
    fit: QuantileProcessFit,
    curves: NDArray[np.float64],
    q_tau: float,
    tau: float,
    *,
    raw: bool = False,
) -> MatchResult:
    m = fit.grid.m
    if curves.shape[1] != m:
        raise GridMismatchError(f"Curves have {curves.shape[1]} levels, the grid has {m}")

    if raw:
        index, branch = _match_raw(curves, q_tau)
    else:
        # Rows are nondecreasing, so the count of levels at or below q is the bracket
        count = np.count_nonzero(curves <= q_tau, axis=1)
        index = np.clip(count - 1, 0, m - 1)
        branch = np.where(count == 0, 0, np.where(count == m, 2, 1))

    labels = (MatchBranch.below, MatchBranch.interior, MatchBranch.above)
    xi = fit.grid.levels[index].copy()
    xi[branch == 0] = fit.grid.epsilon
    return MatchResult(
        tau=tau,
        q_tau=float(q_tau),
        xi=xi,
        xi_index=index.astype(np.intp),
        matched_slope=fit.target_slopes[index],
        branch=tuple(labels[b] for b in branch),
    )


def _match_raw(
    curves: NDArray[np.float64], q_tau: float
) -> tuple[NDArray[np.intp], NDArray[np.int_]]:
    """Matching on unrearranged curves; the smallest bracketing j wins."""
    n, m = curves.shape
    brackets = (curves[:, :-1] <= q_tau) & (q_tau < curves[:, 1:])
    below = q_tau < curves[:, 0]
    above = ~below & (curves[:, -1] <= q_tau)

    multiple = int(np.count_nonzero(brackets.sum(axis=1) > 1))
    if multiple:
        logger.info(f"Raw matching: {multiple} observation(s) with several brackets")

    index = np.argmax(brackets, axis=1)
    branch = np.ones(n, dtype=np.int_)
    index[below] = 0
    branch[below] = 0
    index[above] = m - 1
    branch[above] = 2
    return index.astype(np.intp), branch


def oracle_xi_location_scale(
    alpha0: float,
    alpha1: float,
    theta: float,
    u_dist: ErrorDistribution,
    q_tau: float,
    x1: ArrayLike,
) -> float | NDArray[np.float64]:
    """F_U((q_tau - alpha0 - alpha1 * x1) / (1 + theta * x1)) for y = alpha0 + alpha1 x1 + (1 + theta x1) u."""
    x = np.asarray(x1, dtype=np.float64)
    scale = 1.0 + theta * x
    if np.any(scale <= 0):
        raise ScaleNonPositiveError(
            "Conditional scale 1 + theta * x1 must be positive",
            {"theta": theta, "min_scale": float(np.min(scale))},
        )
    level = error_cdf(u_dist, (q_tau - alpha0 - alpha1 * x) / scale)
    return float(level) if level.ndim == 0 else level
