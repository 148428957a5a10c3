"""
Recentered influence function baselines.

RIF(y; q_tau) = q_tau + (tau - 1{y <= q_tau}) / f_Y(q_tau) is regressed on the
covariates. RIF-OLS uses univariate powers of each non-intercept covariate
(no cross terms) and reports the sample-average derivative in the target.
RIF-Logit fits a logit of 1{y > q_tau} and divides the average marginal
effect of the target by f_Y(q_tau).
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg
from scipy.special import expit

from ..core.config import Config
from ..core.exceptions import (
    DegenerateIndicatorError,
    InvalidLevelError,
    RankDeficientDesignError,
    SeparationDetectedError,
    SolverDivergenceError,
    ZeroDensityError,
    stage_label,
)
from ..models import Dataset, RifEstimate, RifVariant
from .qr_core import unconditional_quantile
from .smoothing import GAUSSIAN, BandwidthRule, KernelSpec, bandwidth, kde_at

logger = logging.getLogger(__name__)

MIN_DENSITY = 1e-12
LOGIT_GRAD_TOL = 1e-8
MAX_HALVINGS = 40


@dataclass(frozen=True)
class LogitFit:
    gamma: NDArray[np.float64]
    loglik: float
    iterations: int
    loglik_path: tuple[float, ...]


def rif_parts(
    y: ArrayLike, tau: float, h: float, spec: KernelSpec = GAUSSIAN
) -> tuple[float, float]:
    """Sample quantile and kernel density at it; raises ZeroDensityError."""
    q = unconditional_quantile(y, tau)
    f = kde_at(y, q, h, spec)
    if f <= MIN_DENSITY:
        raise ZeroDensityError(
            f"Density estimate {f:.3g} at q={q:.6g} is too small", {"tau": tau, "q_tau": q}
        )
    return q, f


def compute_rif(
    y: ArrayLike, tau: float, h: float, spec: KernelSpec = GAUSSIAN
) -> NDArray[np.float64]:
    values = np.asarray(y, dtype=np.float64)
    q, f = rif_parts(values, tau, h, spec)
    return q + (tau - (values <= q)) / f


def _resolve_bandwidth(data: Dataset, h: float | None) -> float:
    return bandwidth(BandwidthRule(), data.y) if h is None else h


def _standardized(data: Dataset) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Non-intercept columns centered and scaled; returns (z, scale)."""
    x = data.x[:, 1:]
    scale = np.std(x, axis=0)
    if np.any(scale == 0):
        raise RankDeficientDesignError("A covariate is constant apart from the intercept")
    return (x - x.mean(axis=0)) / scale, scale


def rif_ols_uqpe(
    data: Dataset, tau: float, degree: int = 3, h: float | None = None
) -> RifEstimate:
    """RIF-OLS with a polynomial of the given degree in each covariate."""
    if degree not in (1, 2, 3):
        raise InvalidLevelError(f"Polynomial degree must be 1, 2 or 3, got {degree}")
    with stage_label("rif_baseline"):
        h = _resolve_bandwidth(data, h)
        q, f = rif_parts(data.y, tau, h)
        rif = q + (tau - (data.y <= q)) / f

        z, scale = _standardized(data)
        powers = [z**k for k in range(1, degree + 1)]
        design = np.column_stack([np.ones(data.n), *powers])
        coef, _, rank, _ = linalg.lstsq(design, rif)
        if rank < design.shape[1]:
            raise RankDeficientDesignError(
                f"Polynomial design of degree {degree} has rank {rank} < {design.shape[1]}",
                {"tau": tau, "degree": degree},
            )

        # Column of power k for covariate c sits at 1 + (k - 1) * p + c
        p = z.shape[1]
        c = data.target_index - 1
        zt = z[:, c]
        slope = sum(
            k * coef[1 + (k - 1) * p + c] * zt ** (k - 1) for k in range(1, degree + 1)
        )
        estimate = float(np.mean(slope)) / float(scale[c])

    variant = {1: RifVariant.ols_linear, 2: RifVariant.ols_quadratic, 3: RifVariant.ols_cubic}[degree]
    return RifEstimate(
        tau=tau,
        estimate=estimate,
        variant=variant,
        density_at_q=f,
        q_tau=q,
        bandwidth=h,
        n=data.n,
    )


def _loglik(design: NDArray[np.float64], t: NDArray[np.float64], gamma: NDArray[np.float64]) -> float:
    index = design @ gamma
    return float(np.sum(t * index - np.logaddexp(0.0, index)))


def fit_logit(
    design: NDArray[np.float64],
    t: NDArray[np.float64],
    max_iter: int | None = None,
) -> LogitFit:
    """Maximum likelihood logit by Newton steps with step halving."""
    max_iter = Config.SOLVER_MAX_ITER if max_iter is None else max_iter
    n, k = design.shape
    if np.all(t == t[0]):
        raise DegenerateIndicatorError("Indicator takes a single value; logit is undefined")

    gamma = np.zeros(k)
    loglik = _loglik(design, t, gamma)
    path = [loglik]
    for iteration in range(1, max_iter + 1):
        p = expit(design @ gamma)
        grad = design.T @ (t - p)
        if np.max(np.abs(grad)) / n <= LOGIT_GRAD_TOL:
            return LogitFit(gamma, loglik, iteration - 1, tuple(path))

        hessian = (design * (p * (1.0 - p))[:, None]).T @ design
        try:
            step = linalg.solve(hessian, grad, assume_a="pos")
        except (linalg.LinAlgError, ValueError):
            raise SeparationDetectedError(
                "Logit information matrix became singular; the indicator is separated",
                {"iteration": iteration},
            ) from None

        size = 1.0
        for _ in range(MAX_HALVINGS):
            candidate = gamma + size * step
            new_loglik = _loglik(design, t, candidate)
            if new_loglik >= loglik:
                break
            size /= 2.0
        else:
            raise SolverDivergenceError(
                "Logit step halving failed to increase the likelihood",
                {"iteration": iteration},
            )
        gamma, loglik = candidate, new_loglik
        path.append(loglik)
        logger.debug(f"logit iteration {iteration}: loglik {loglik:.10g}")

        index = design @ gamma
        # A perfectly classifying index means the likelihood has no maximum
        if np.all((index > 0) == (t > 0.5)):
            raise SeparationDetectedError(
                "Logit coefficients diverge: the indicator is perfectly separated",
                {"iteration": iteration},
            )

    raise SeparationDetectedError(
        f"Logit did not converge in {max_iter} iterations; coefficients diverge",
        {"gamma_norm": float(np.linalg.norm(gamma))},
    )


def rif_logit_uqpe(
    data: Dataset,
    tau: float,
    h: float | None = None,
    *,
    include_target: bool = True,
) -> RifEstimate:
    with stage_label("rif_baseline"):
        h = _resolve_bandwidth(data, h)
        q, f = rif_parts(data.y, tau, h)
        t = (data.y > q).astype(np.float64)

        z, scale = _standardized(data)
        c = data.target_index - 1
        keep = [j for j in range(z.shape[1]) if include_target or j != c]
        design = np.column_stack([np.ones(data.n), z[:, keep]])
        fit = fit_logit(design, t)

        if include_target:
            gamma_target = float(fit.gamma[1 + keep.index(c)]) / float(scale[c])
        else:
            gamma_target = 0.0
        p = expit(design @ fit.gamma)
        estimate = float(np.mean(p * (1.0 - p))) * gamma_target / f

    return RifEstimate(
        tau=tau,
        estimate=estimate,
        variant=RifVariant.logit,
        density_at_q=f,
        q_tau=q,
        bandwidth=h,
        n=data.n,
    )


def rif_uqpe(
    data: Dataset, tau: float, variant: RifVariant, h: float | None = None
) -> RifEstimate:
    """Dispatch on the RIF variant."""
    if variant is RifVariant.logit:
        return rif_logit_uqpe(data, tau, h)
    assert variant.degree is not None
    return rif_ols_uqpe(data, tau, variant.degree, h)
