"""Result record schemas for JSON and CSV output."""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from ..models import (
    BootstrapResult,
    CqpeEstimate,
    MatchingBand,
    MatchResult,
    RifEstimate,
    SimulationCell,
    UqpeEstimate,
)

ESTIMATE_COLUMNS = [
    "method",
    "tau",
    "estimate",
    "q_tau",
    "bandwidth",
    "n",
    "grid_m",
    "boundary_hits",
    "se",
    "gaussian_lo",
    "gaussian_hi",
    "percentile_lo",
    "percentile_hi",
    "B",
]


class InferenceRecord(BaseModel):
    """Pairwise bootstrap summary."""

    se: float = Field(..., ge=0)
    gaussian_lo: float
    gaussian_hi: float
    percentile_lo: float
    percentile_hi: float
    B: int = Field(..., ge=2)
    seed: int
    alpha: float = Field(0.05, gt=0, lt=1)
    retries: int = Field(0, ge=0)

    @classmethod
    def from_result(cls, result: BootstrapResult) -> "InferenceRecord":
        return cls(
            se=result.se,
            gaussian_lo=result.gaussian_ci[0],
            gaussian_hi=result.gaussian_ci[1],
            percentile_lo=result.percentile_ci[0],
            percentile_hi=result.percentile_ci[1],
            B=result.B,
            seed=result.seed,
            alpha=result.alpha,
            retries=result.retries,
        )


class EstimateRecord(BaseModel):
    """Fields shared by every per-tau estimate record."""

    model_config = ConfigDict(use_enum_values=True)

    method: str
    tau: float = Field(..., gt=0, lt=1)
    estimate: float
    q_tau: float | None = None
    bandwidth: float | None = None
    n: int = Field(..., ge=1)
    grid_m: int | None = None
    boundary_hits: int | None = None
    inference: InferenceRecord | None = None

    def csv_row(self) -> dict[str, Any]:
        row = {column: getattr(self, column, None) for column in ESTIMATE_COLUMNS[:8]}
        inference = self.inference
        row.update(
            se=inference.se if inference else None,
            gaussian_lo=inference.gaussian_lo if inference else None,
            gaussian_hi=inference.gaussian_hi if inference else None,
            percentile_lo=inference.percentile_lo if inference else None,
            percentile_hi=inference.percentile_hi if inference else None,
            B=inference.B if inference else None,
        )
        return row


class UqpeRecord(EstimateRecord):
    literal: bool = False

    @classmethod
    def from_estimate(
        cls, est: UqpeEstimate, inference: BootstrapResult | None = None
    ) -> "UqpeRecord":
        return cls(
            method=str(est.method),
            tau=est.tau,
            estimate=est.estimate,
            q_tau=est.q_tau,
            bandwidth=est.bandwidth,
            n=est.n,
            grid_m=est.grid_m,
            boundary_hits=est.boundary_hits,
            literal=est.literal,
            inference=InferenceRecord.from_result(inference) if inference else None,
        )


class RifRecord(EstimateRecord):
    variant: str
    density_at_q: float = Field(..., gt=0)

    @classmethod
    def from_estimate(
        cls, est: RifEstimate, inference: BootstrapResult | None = None
    ) -> "RifRecord":
        return cls(
            method=f"rif-{est.variant}",
            variant=str(est.variant),
            tau=est.tau,
            estimate=est.estimate,
            q_tau=est.q_tau,
            bandwidth=est.bandwidth,
            n=est.n,
            density_at_q=est.density_at_q,
            inference=InferenceRecord.from_result(inference) if inference else None,
        )


class CqpeRecord(EstimateRecord):
    """Conditional quantile slope reported at eta = tau."""

    grid_eta: float

    @classmethod
    def from_estimate(
        cls, est: CqpeEstimate, inference: BootstrapResult | None = None
    ) -> "CqpeRecord":
        return cls(
            method="cqr",
            tau=est.eta,
            estimate=est.estimate,
            n=est.n,
            grid_m=est.grid_m,
            grid_eta=est.grid_eta,
            inference=InferenceRecord.from_result(inference) if inference else None,
        )


class MatchRow(BaseModel):
    tau: float
    row: int
    x_target: float
    xi: float
    matched_slope: float
    branch: str
    slope_lo: float | None = None
    slope_hi: float | None = None

    @classmethod
    def from_result(
        cls,
        result: MatchResult,
        x_target: list[float],
        bands: tuple[list[float], list[float]] | None = None,
    ) -> list["MatchRow"]:
        return [
            cls(
                tau=result.tau,
                row=i + 1,
                x_target=x_target[i],
                xi=float(result.xi[i]),
                matched_slope=float(result.matched_slope[i]),
                branch=str(result.branch[i]),
                slope_lo=bands[0][i] if bands else None,
                slope_hi=bands[1][i] if bands else None,
            )
            for i in range(result.n)
        ]


class SimulationRow(BaseModel):
    estimator: str
    tau: float
    n: int
    bias: float
    variance: float
    mse: float

    @classmethod
    def from_cell(cls, cell: SimulationCell) -> "SimulationRow":
        return cls(
            estimator=cell.estimator,
            tau=cell.tau,
            n=cell.n,
            bias=cell.bias,
            variance=cell.variance,
            mse=cell.mse,
        )


class CoverageRow(BaseModel):
    tau: float
    n: int
    gaussian: float = Field(..., ge=0, le=1)
    percentile: float = Field(..., ge=0, le=1)

    @classmethod
    def from_cell(cls, cell: SimulationCell) -> "CoverageRow":
        return cls(
            tau=cell.tau,
            n=cell.n,
            gaussian=cell.gaussian_coverage or 0.0,
            percentile=cell.percentile_coverage or 0.0,
        )


class MatchingRow(BaseModel):
    tau: float
    x: float
    xi_true: float
    xi_mean: float
    xi_lo: float
    xi_hi: float

    @classmethod
    def from_band(cls, band: MatchingBand) -> "MatchingRow":
        return cls(
            tau=band.tau,
            x=band.x,
            xi_true=band.xi_true,
            xi_mean=band.xi_mean,
            xi_lo=band.xi_lo,
            xi_hi=band.xi_hi,
        )
