"""
Kernels, bandwidth rules and second-stage regressions.

Only the second-order Gaussian kernel ships. Kernel weights inside the
regressions are computed relative to the largest weight, which leaves the
ratio estimators unchanged and keeps far-away evaluation points from
underflowing to zero mass.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg, stats

from ..core.exceptions import (
    DegenerateSampleError,
    InvalidBandwidthError,
    SingularLocalDesignError,
    ZeroWeightMassError,
)
from ..models import KernelFamily

logger = logging.getLogger(__name__)

SILVERMAN_CONSTANT = 0.9
DEFAULT_EXPONENT = 0.2
NAMED_EXPONENTS = (1 / 4, 1 / 5, 1 / 6)


@dataclass(frozen=True)
class KernelSpec:
    """Symmetric kernel K integrating to one.

    Gaussian: K(u) = exp(-u^2 / 2) / sqrt(2 pi), order r = 2, bounded,
    everywhere differentiable with integrable square.
    """

    family: KernelFamily = KernelFamily.gaussian

    @property
    def order(self) -> int:
        return 2

    def density(self, u: ArrayLike) -> NDArray[np.float64]:
        return stats.norm.pdf(np.asarray(u, dtype=np.float64))

    def log_density(self, u: ArrayLike) -> NDArray[np.float64]:
        return stats.norm.logpdf(np.asarray(u, dtype=np.float64))


GAUSSIAN = KernelSpec()


@dataclass(frozen=True)
class BandwidthRule:
    """h = constant * sd(y) * n^(-exponent)."""

    constant: float = SILVERMAN_CONSTANT
    exponent: float = DEFAULT_EXPONENT
    kernel_order: int = 2

    def __post_init__(self) -> None:
        if not self.constant > 0:
            raise InvalidBandwidthError(
                f"Bandwidth constant must be positive, got {self.constant}"
            )
        named = any(math.isclose(self.exponent, a) for a in NAMED_EXPONENTS)
        lower = 1.0 / (1 + 2 * self.kernel_order)
        if not named and not lower <= self.exponent < 0.5:
            raise InvalidBandwidthError(
                f"Bandwidth exponent must be one of 1/4, 1/5, 1/6 or lie in "
                f"[{lower:.4g}, 0.5), got {self.exponent}",
                {"exponent": self.exponent},
            )

    @classmethod
    def from_label(cls, label: str, constant: float = SILVERMAN_CONSTANT) -> "BandwidthRule":
        """Parse an exponent written as '1/5' or '0.2'."""
        text = label.strip()
        try:
            if "/" in text:
                num, den = text.split("/", 1)
                exponent = float(num) / float(den)
            else:
                exponent = float(text)
        except (ValueError, ZeroDivisionError):
            raise InvalidBandwidthError(f"Cannot parse bandwidth exponent {label!r}") from None
        return cls(constant=constant, exponent=exponent)

    @property
    def label(self) -> str:
        for a, text in zip(NAMED_EXPONENTS, ("1/4", "1/5", "1/6"), strict=True):
            if math.isclose(self.exponent, a):
                return text
        return f"{self.exponent:g}"


def bandwidth(rule: BandwidthRule, y: ArrayLike) -> float:
    values = np.asarray(y, dtype=np.float64)
    n = values.size
    if n < 2:
        raise DegenerateSampleError(f"Bandwidth needs n >= 2, got {n}")
    sigma = float(np.std(values, ddof=1))
    if sigma <= 0:
        raise DegenerateSampleError("Outcome has zero sample standard deviation")
    return rule.constant * sigma * n ** (-rule.exponent)


def _require_bandwidth(h: float) -> None:
    if not (h > 0 and math.isfinite(h)):
        raise InvalidBandwidthError(f"Bandwidth must be positive and finite, got {h}")


def kernel_weight(spec: KernelSpec, u: ArrayLike, h: float) -> NDArray[np.float64] | float:
    """K_h(u) = K(u / h) / h."""
    _require_bandwidth(h)
    weight = spec.density(np.asarray(u, dtype=np.float64) / h) / h
    return float(weight) if np.ndim(weight) == 0 else weight


def kde_at(y: ArrayLike, point: float, h: float, spec: KernelSpec = GAUSSIAN) -> float:
    """(1/n) sum_i K_h(y_i - point)."""
    values = np.asarray(y, dtype=np.float64)
    return float(np.mean(kernel_weight(spec, values - point, h)))


def relative_weights(
    y: NDArray[np.float64], point: float, h: float, spec: KernelSpec
) -> NDArray[np.float64]:
    """Kernel weights divided by their maximum (largest weight is exactly 1)."""
    _require_bandwidth(h)
    log_w = spec.log_density((y - point) / h)
    top = float(np.max(log_w))
    if not math.isfinite(top):
        raise ZeroWeightMassError("All kernel weights vanish at the evaluation point")
    return np.exp(log_w - top)


def _pair(responses: ArrayLike, y: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    r = np.asarray(responses, dtype=np.float64).ravel()
    yy = np.asarray(y, dtype=np.float64).ravel()
    if r.shape != yy.shape or r.size == 0:
        raise DegenerateSampleError(
            f"Responses ({r.size}) and outcomes ({yy.size}) must be nonempty and aligned"
        )
    return r, yy


def nw_regress(
    responses: ArrayLike,
    y: ArrayLike,
    point: float,
    h: float,
    spec: KernelSpec = GAUSSIAN,
) -> float:
    """Nadaraya-Watson estimate sum K_h(y_i - point) r_i / sum K_h(y_i - point)."""
    r, yy = _pair(responses, y)
    w = relative_weights(yy, point, h, spec)
    mass = float(np.sum(w))
    if mass <= 0:
        raise ZeroWeightMassError("Kernel weights sum to zero")
    # Centering on the smallest response makes constant responses exact
    base = float(np.min(r))
    estimate = base + float(np.sum(w * (r - base))) / mass
    return float(np.clip(estimate, base, float(np.max(r))))


def local_linear_regress(
    responses: ArrayLike,
    y: ArrayLike,
    point: float,
    h: float,
    spec: KernelSpec = GAUSSIAN,
    *,
    literal: bool = False,
) -> float:
    """
    Local linear estimate at `point`.

    Minimizes sum K_h(y_i - point) [r_i - a0 - a1 (y_i - point) / h]^2 and
    returns a0. With `literal=True` returns a0 + a1 * point instead.

    Raises:
        SingularLocalDesignError: the weighted design has rank below 2
    """
    r, yy = _pair(responses, y)
    w = relative_weights(yy, point, h, spec)
    root = np.sqrt(w)
    design = np.column_stack([root, root * (yy - point) / h])
    base = float(np.min(r))
    coef, _, rank, _ = linalg.lstsq(design, root * (r - base), lapack_driver="gelsd")
    if rank < 2:
        raise SingularLocalDesignError(
            "Local design is singular: weighted mass sits on one outcome value",
            {"point": point, "bandwidth": h},
        )
    a0 = base + float(coef[0])
    if literal:
        return a0 + float(coef[1]) * point
    return a0


def global_linear_regress(responses: ArrayLike, y: ArrayLike, point: float) -> float:
    """OLS of responses on (1, y), predicted at `point`."""
    r, yy = _pair(responses, y)
    if np.ptp(yy) == 0:
        raise SingularLocalDesignError("Outcome is constant; the linear fit is singular")
    base = float(np.min(r))
    design = np.column_stack([np.ones_like(yy), yy - point])
    coef, *_ = linalg.lstsq(design, r - base)
    return base + float(coef[0])
