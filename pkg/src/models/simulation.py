"""Monte Carlo designs and reports."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from numpy.typing import NDArray

from ..core.exceptions import InvalidDatasetError
from .base import ErrorDistribution, ExtraCovariate

# Share of failed replications above which a cell invalidates its report
MAX_FAILURE_SHARE = 0.01


@dataclass(frozen=True)
class DgpSpec:
    """y = 1 [+ w] + x + (1 + theta * x) * u with x ~ N(10, 1)."""

    theta: float = 0.0
    u_dist: ErrorDistribution = ErrorDistribution.normal
    extra_covariate: ExtraCovariate = ExtraCovariate.none
    n: int = 500
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 10:
            raise InvalidDatasetError(f"DGP sample size must be >= 10, got {self.n}")

    @property
    def population(self) -> tuple[float, ErrorDistribution, ExtraCovariate]:
        """The part of the design that determines the population law."""
        return (float(self.theta), self.u_dist, self.extra_covariate)

    @property
    def label(self) -> str:
        base = "loc" if self.theta == 0 else "locscale"
        suffix = {
            ExtraCovariate.none: "",
            ExtraCovariate.independent: "-w",
            ExtraCovariate.correlated: "-wcorr",
        }[self.extra_covariate]
        dist = "normal" if self.u_dist is ErrorDistribution.normal else "chi2"
        return f"{base}-{dist}{suffix}"

    def with_sample(self, n: int, seed: int) -> DgpSpec:
        return replace(self, n=n, seed=seed)

    @classmethod
    def preset(cls, name: str, n: int = 500, seed: int = 0) -> DgpSpec:
        try:
            theta, u_dist, extra = DGP_PRESETS[name]
        except KeyError:
            raise InvalidDatasetError(
                f"Unknown DGP {name!r}; choose one of {', '.join(DGP_PRESETS)}"
            ) from None
        return cls(theta=theta, u_dist=u_dist, extra_covariate=extra, n=n, seed=seed)


DGP_PRESETS: dict[str, tuple[float, ErrorDistribution, ExtraCovariate]] = {
    "loc-normal": (0.0, ErrorDistribution.normal, ExtraCovariate.none),
    "locscale-normal": (1.0, ErrorDistribution.normal, ExtraCovariate.none),
    "locscale-chi2": (1.0, ErrorDistribution.chi2_standardized, ExtraCovariate.none),
    "locscale-normal-w": (1.0, ErrorDistribution.normal, ExtraCovariate.independent),
    "locscale-normal-wcorr": (1.0, ErrorDistribution.normal, ExtraCovariate.correlated),
}


@dataclass
class SimulationCell:
    """Accuracy summary of one estimator at one (tau, n)."""

    estimator: str
    tau: float
    n: int
    truth: float
    estimates: list[float] = field(default_factory=list)
    failures: int = 0
    gaussian_hits: int = 0
    percentile_hits: int = 0
    covered: int = 0

    @property
    def reps(self) -> int:
        return len(self.estimates) + self.failures

    @property
    def failure_share(self) -> float:
        return self.failures / self.reps if self.reps else 0.0

    @property
    def valid(self) -> bool:
        return bool(self.estimates) and self.failure_share <= MAX_FAILURE_SHARE

    def _errors(self) -> NDArray[np.float64]:
        return np.asarray(self.estimates, dtype=np.float64) - self.truth

    @property
    def bias(self) -> float:
        return float(np.mean(self._errors())) if self.estimates else float("nan")

    @property
    def variance(self) -> float:
        return float(np.var(self.estimates, ddof=0)) if self.estimates else float("nan")

    @property
    def mse(self) -> float:
        return float(np.mean(self._errors() ** 2)) if self.estimates else float("nan")

    @property
    def gaussian_coverage(self) -> float | None:
        return self.gaussian_hits / self.covered if self.covered else None

    @property
    def percentile_coverage(self) -> float | None:
        return self.percentile_hits / self.covered if self.covered else None


@dataclass
class SimulationReport:
    cells: dict[tuple[str, float, int], SimulationCell]
    reps: int
    seed: int
    config: dict[str, Any] = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return all(cell.valid for cell in self.cells.values())

    @property
    def invalid_cells(self) -> list[SimulationCell]:
        return [cell for cell in self.cells.values() if not cell.valid]

    def cell(self, estimator: str, tau: float, n: int) -> SimulationCell:
        return self.cells[(estimator, tau, n)]

    def ordered_cells(self) -> list[SimulationCell]:
        return [self.cells[key] for key in sorted(self.cells, key=lambda k: (k[0], k[2], k[1]))]


@dataclass(frozen=True)
class MatchingBand:
    """Oracle and Monte Carlo summary of the matching map at one (tau, x)."""

    tau: float
    x: float
    xi_true: float
    xi_mean: float
    xi_lo: float
    xi_hi: float
    rmse: float
