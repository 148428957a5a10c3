"""
Linear quantile regression by check-loss minimization.

The solver is a Frisch-Newton primal-dual interior point method with a
Mehrotra predictor-corrector step, run on the bounded dual LP

    max  y'd   s.t.  X'd = (1 - eta) X'1,  0 <= d <= 1

whose multipliers are the regression coefficients. The interior solution is
then polished to the basic (interpolating) solution over the d observations
with the smallest residuals, and kept when a subgradient certificate proves
it optimal. When the minimizer is not unique, flat edges of the optimal set
are followed toward the lowest mean fitted value, so ties resolve the same
way for any row order. Ill-conditioned designs go to scipy's HiGHS LP solver
instead.
"""

import logging
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg
from scipy.optimize import linprog

from ..core.config import Config
from ..core.exceptions import (
    EmptyInputError,
    InvalidLevelError,
    RankDeficientDesignError,
    SolverDivergenceError,
    stage_label,
)
from ..models import Dataset, QrFit

logger = logging.getLogger(__name__)

# Fraction of the distance to the boundary taken by each interior step
STEP_FRACTION = 0.99995
# Designs with a larger condition number are handed to the LP fallback
CONDITION_LIMIT = 1e10
# Slack on the subgradient certificate interval [eta - 1, eta]
CERTIFICATE_SLACK = 1e-9
# Tie tolerance when comparing order statistics against n * tau
RANK_EPS = 1e-9
# Residuals below this multiple of max|y| count as zero
ZERO_RESIDUAL = 1e-12


def check_loss(u: ArrayLike, tau: float) -> NDArray[np.float64] | float:
    """rho_tau(u) = u * (tau - 1{u < 0}), elementwise."""
    _require_level(tau, "tau")
    arr = np.asarray(u, dtype=np.float64)
    loss = arr * (tau - (arr < 0))
    return float(loss) if loss.ndim == 0 else loss


def mean_check_loss(residuals: NDArray[np.float64], tau: float) -> float:
    return float(np.mean(residuals * (tau - (residuals < 0))))


def unconditional_quantile(y: ArrayLike, tau: float) -> float:
    """Lower endpoint of the check-loss minimizer: the order statistic y_(ceil(n tau))."""
    _require_level(tau, "tau")
    values = np.asarray(y, dtype=np.float64).ravel()
    if values.size == 0:
        raise EmptyInputError("Cannot take a quantile of an empty sample")
    rank = max(math.ceil(values.size * tau - RANK_EPS), 1)
    return float(np.partition(values, rank - 1)[rank - 1])


def fit_quantile(data: Dataset, eta: float) -> QrFit:
    """Fit the linear conditional eta-quantile of y given x."""
    with stage_label("qr_core"):
        return solve_quantile_regression(data.y, data.x, eta)


def solve_quantile_regression(
    y: ArrayLike,
    x: ArrayLike,
    eta: float,
    *,
    tol: float | None = None,
    max_iter: int | None = None,
) -> QrFit:
    """
    Minimize (1/n) sum rho_eta(y_i - x_i'b) over b.

    Args:
        y: Outcome vector of length n
        x: Design matrix n x d (an intercept column is the caller's choice)
        eta: Quantile level in (0, 1)
        tol: Relative duality gap tolerance (Config.SOLVER_TOL by default)
        max_iter: Iteration cap (Config.SOLVER_MAX_ITER by default)

    Raises:
        RankDeficientDesignError: x does not have full column rank
        SolverDivergenceError: the iteration cap was hit without an
            optimality certificate
    """
    _require_level(eta, "eta")
    tol = Config.SOLVER_TOL if tol is None else tol
    max_iter = Config.SOLVER_MAX_ITER if max_iter is None else max_iter

    y_arr = np.asarray(y, dtype=np.float64).ravel()
    x_arr = np.asarray(x, dtype=np.float64)
    if x_arr.ndim == 1:
        x_arr = x_arr[:, None]
    n, d = x_arr.shape
    if n == 0:
        raise EmptyInputError("Cannot fit a quantile regression on zero rows")

    singular = linalg.svdvals(x_arr)
    rank_tol = singular[0] * max(n, d) * np.finfo(np.float64).eps
    if singular[-1] <= rank_tol or n < d:
        raise RankDeficientDesignError(
            f"Design matrix has rank below {d} columns",
            {"eta": eta, "smallest_singular_value": float(singular[-1])},
        )
    condition = float(singular[0] / singular[-1])
    if condition > CONDITION_LIMIT:
        logger.warning(
            f"Design condition number {condition:.3g} exceeds {CONDITION_LIMIT:.0e}; "
            "using the HiGHS LP fallback"
        )
        return _fit_highs(y_arr, x_arr, eta)

    beta, iterations, converged = _frisch_newton(y_arr, x_arr, eta, tol, max_iter)
    polished = _polish(y_arr, x_arr, eta, beta)
    if polished is not None:
        beta, certified, basis = polished
        if certified:
            beta = _lowest_optimal_vertex(y_arr, x_arr, eta, basis, beta)
        converged = converged or certified
    if not converged:
        raise SolverDivergenceError(
            f"Interior point solver hit {max_iter} iterations without convergence",
            {"eta": eta, "iterations": iterations},
        )

    objective = mean_check_loss(y_arr - x_arr @ beta, eta)
    return QrFit(
        eta=eta,
        beta=beta,
        objective=objective,
        iterations=iterations,
        converged=True,
    )


def _require_level(value: float, name: str) -> None:
    if not 0.0 < value < 1.0:
        raise InvalidLevelError(f"{name} must lie in (0, 1), got {value}", {name: value})


def _step_length(v: NDArray[np.float64], dv: NDArray[np.float64]) -> float:
    """Largest step in [0, 1] (before damping) keeping v + step * dv >= 0."""
    shrinking = dv < 0
    if not np.any(shrinking):
        return 1.0
    return float(np.min(-v[shrinking] / dv[shrinking]))


def _frisch_newton(
    y: NDArray[np.float64],
    x: NDArray[np.float64],
    eta: float,
    tol: float,
    max_iter: int,
) -> tuple[NDArray[np.float64], int, bool]:
    n, _ = x.shape
    a = x.T
    c = -y
    u = np.ones(n)
    primal = np.full(n, 1.0 - eta)
    b = a @ primal
    slack = u - primal

    # Start from the least squares dual point
    dual = linalg.lstsq(x, c)[0]
    r = c - x @ dual
    r = r + 0.001 * (r == 0)
    z = np.where(r > 0, r, 0.0)
    w = z - r

    gap = float(c @ primal - dual @ b + w @ u)
    iterations = 0
    while gap > tol * (1.0 + abs(float(c @ primal))) and iterations < max_iter:
        iterations += 1

        # Affine scaling predictor
        q = 1.0 / (z / primal + w / slack)
        r = z - w
        normal = (a * q) @ a.T
        try:
            factor = linalg.cho_factor(normal, check_finite=False)
        except linalg.LinAlgError:
            logger.debug(f"eta={eta:.4f}: normal equations lost definiteness at iteration {iterations}")
            break
        dy = linalg.cho_solve(factor, a @ (q * r))
        dx = q * (a.T @ dy - r)
        ds = -dx
        dz = -z * (dx / primal + 1.0)
        dw = -w * (ds / slack + 1.0)

        fp = min(STEP_FRACTION * min(_step_length(primal, dx), _step_length(slack, ds)), 1.0)
        fd = min(STEP_FRACTION * min(_step_length(w, dw), _step_length(z, dz)), 1.0)

        mu = float(z @ primal + w @ slack)
        if min(fp, fd) < 1.0 and mu > 0:
            # Centering corrector
            g = float((z + fd * dz) @ (primal + fp * dx) + (w + fd * dw) @ (slack + fp * ds))
            mu = mu * (g / mu) ** 3 / (2.0 * n)
            dxdz = dx * dz
            dsdw = ds * dw
            xi = mu * (1.0 / primal - 1.0 / slack)
            adjusted = r - xi + dxdz / primal - dsdw / slack
            dy = linalg.cho_solve(factor, a @ (q * adjusted))
            dx = q * (a.T @ dy - adjusted)
            ds = -dx
            dz = (mu - dxdz) / primal - z - z * dx / primal
            dw = (mu - dsdw) / slack - w - w * ds / slack

            fp = min(STEP_FRACTION * min(_step_length(primal, dx), _step_length(slack, ds)), 1.0)
            fd = min(STEP_FRACTION * min(_step_length(w, dw), _step_length(z, dz)), 1.0)

        primal = primal + fp * dx
        slack = slack + fp * ds
        dual = dual + fd * dy
        w = w + fd * dw
        z = z + fd * dz
        gap = float(c @ primal - dual @ b + w @ u)
        logger.debug(f"eta={eta:.4f} iteration {iterations}: duality gap {gap:.3e}")

    converged = gap <= tol * (1.0 + abs(float(c @ primal)))
    return -dual, iterations, converged


def _polish(
    y: NDArray[np.float64],
    x: NDArray[np.float64],
    eta: float,
    beta: NDArray[np.float64],
) -> tuple[NDArray[np.float64], bool, list[int]] | None:
    """Move to the basic solution nearest `beta` and test its optimality.

    Returns the basic solution, whether the certificate holds and the basis
    rows, or None when no usable basis is found or the basic solution is worse.
    """
    d = x.shape[1]
    order = np.argsort(np.abs(y - x @ beta), kind="stable")
    basis: list[int] = []
    for i in order:
        trial = basis + [int(i)]
        if np.linalg.matrix_rank(x[trial]) == len(trial):
            basis = trial
            if len(basis) == d:
                break
    if len(basis) < d:
        return None

    x_h = x[basis]
    try:
        candidate = linalg.solve(x_h, y[basis])
    except linalg.LinAlgError:
        return None

    residuals = y - x @ candidate
    if mean_check_loss(residuals, eta) > mean_check_loss(y - x @ beta, eta) * (1 + 1e-12) + 1e-15:
        return None

    v = _basis_multipliers(y, x, eta, basis, candidate)
    certified = bool(np.all((v >= eta - 1 - CERTIFICATE_SLACK) & (v <= eta + CERTIFICATE_SLACK)))
    return candidate, certified, basis


def _basis_multipliers(
    y: NDArray[np.float64],
    x: NDArray[np.float64],
    eta: float,
    basis: list[int],
    beta: NDArray[np.float64],
) -> NDArray[np.float64]:
    """Subgradient weights of the basis rows; optimal when all lie in [eta - 1, eta]."""
    outside = np.ones(x.shape[0], dtype=bool)
    outside[basis] = False
    residuals = y[outside] - x[outside] @ beta
    signs = eta - (residuals < -ZERO_RESIDUAL * _scale(y))
    return linalg.solve(x[basis].T, -(x[outside].T @ signs))


def _scale(y: NDArray[np.float64]) -> float:
    return max(1.0, float(np.max(np.abs(y))))


def _lowest_optimal_vertex(
    y: NDArray[np.float64],
    x: NDArray[np.float64],
    eta: float,
    basis: list[int],
    beta: NDArray[np.float64],
) -> NDArray[np.float64]:
    """
    Among optimal basic solutions, the one reached by lowering the mean fitted value.

    A basis weight sitting on a bound of [eta - 1, eta] marks an edge of the
    optimal set along which the loss is flat. Each pass follows such an edge
    while it lowers mean(x)'b, stopping at the first outside residual that
    reaches zero, and swaps that row into the basis. For an intercept-only
    design this returns the order statistic y_(ceil(n eta)), the lower end of
    the minimizing interval, whatever the row order.
    """
    n, d = x.shape
    centre = x.mean(axis=0)
    tol = ZERO_RESIDUAL * _scale(y)
    objective = mean_check_loss(y - x @ beta, eta)
    seen = {frozenset(basis)}
    for _ in range(n):
        v = _basis_multipliers(y, x, eta, basis, beta)
        inverse = linalg.inv(x[basis])
        moves = []
        for j in range(d):
            if abs(v[j] - eta) <= CERTIFICATE_SLACK:
                step = -inverse[:, j]
            elif abs(v[j] - (eta - 1.0)) <= CERTIFICATE_SLACK:
                step = inverse[:, j]
            else:
                continue
            gain = float(centre @ step)
            if gain < -CERTIFICATE_SLACK:
                moves.append((gain, j, step))
        if not moves:
            return beta
        _, j, step = min(moves, key=lambda move: (move[0], move[1]))

        residuals = y - x @ beta
        change = x @ step
        outside = np.ones(n, dtype=bool)
        outside[basis] = False
        rising = outside & (change > tol) & (residuals >= -tol)
        falling = outside & (change < -tol) & (residuals < -tol)
        lengths = np.full(n, np.inf)
        lengths[rising] = np.maximum(residuals[rising], 0.0) / change[rising]
        lengths[falling] = residuals[falling] / change[falling]
        entering = int(np.argmin(lengths))
        if not np.isfinite(lengths[entering]):
            return beta

        trial = basis.copy()
        trial[j] = entering
        if frozenset(trial) in seen:
            return beta
        try:
            moved = linalg.solve(x[trial], y[trial])
        except linalg.LinAlgError:
            return beta
        if mean_check_loss(y - x @ moved, eta) > objective * (1 + 1e-12) + 1e-15:
            return beta
        basis, beta = trial, moved
        seen.add(frozenset(basis))
    return beta


def _fit_highs(y: NDArray[np.float64], x: NDArray[np.float64], eta: float) -> QrFit:
    """Solve the primal LP with split coefficients and residuals via HiGHS."""
    n, d = x.shape
    cost = np.concatenate([np.zeros(2 * d), np.full(n, eta), np.full(n, 1.0 - eta)]) / n
    eye = np.eye(n)
    a_eq = np.hstack([x, -x, eye, -eye])
    result = linprog(cost, A_eq=a_eq, b_eq=y, bounds=(0, None), method="highs")
    if result.status != 0:
        raise SolverDivergenceError(
            f"HiGHS fallback failed: {result.message}", {"eta": eta, "status": result.status}
        )
    beta = result.x[:d] - result.x[d : 2 * d]
    return QrFit(
        eta=eta,
        beta=beta,
        objective=mean_check_loss(y - x @ beta, eta),
        iterations=int(result.nit),
        converged=True,
        solver="highs",
    )
