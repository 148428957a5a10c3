"""Resolved run configuration echoed into every output file."""

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.config import Config
from ..models.base import Command, OutputFormat, SmoothingMethod

DEFAULT_TAUS = [0.1, 0.25, 0.5, 0.75, 0.9]
SIMULATION_TAUS = [0.25, 0.5, 0.75]


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", use_enum_values=True)

    command: Command
    version: str = Config.VERSION

    # Input data
    data: Path | None = None
    outcome: str | None = None
    target: str | None = None
    controls: list[str] = Field(default_factory=list)
    drop_na: bool = False

    # Estimation
    taus: list[float] = Field(default_factory=lambda: list(DEFAULT_TAUS))
    grid: int | None = Field(None, ge=3)
    methods: list[SmoothingMethod] = Field(default_factory=lambda: [SmoothingMethod.nw])
    baselines: list[str] = Field(default_factory=list)
    cqr: bool = False
    literal: bool = False
    bandwidth_constant: float = Field(0.9, gt=0)
    bandwidth_exponent: str = "1/5"

    # Inference
    bootstrap: int = Field(200, ge=0)
    alpha: float = Field(0.05, gt=0, lt=1)
    seed: int = Field(Config.DEFAULT_SEED, ge=0)

    # Simulation
    dgps: list[str] = Field(default_factory=list)
    sample_sizes: list[int] = Field(default_factory=list)
    estimators: list[str] = Field(default_factory=list)
    reps: int | None = Field(None, ge=2)
    coverage: bool = False
    sweep_bandwidth: bool = False
    matching: bool = False

    # Output
    raw: bool = False
    threads: int = Field(0, ge=0)
    format: OutputFormat = OutputFormat.csv
    output: Path | None = None
    process_output: Path | None = None

    @field_validator("taus")
    @classmethod
    def taus_in_unit_interval(cls, value: list[float]) -> list[float]:
        if not value:
            raise ValueError("at least one tau is required")
        bad = [t for t in value if not 0 < t < 1]
        if bad:
            raise ValueError(f"every tau must lie in (0, 1), got {bad}")
        return sorted(set(value))

    @field_validator("sample_sizes")
    @classmethod
    def sample_sizes_large_enough(cls, value: list[int]) -> list[int]:
        bad = [n for n in value if n < 10]
        if bad:
            raise ValueError(f"sample sizes must be >= 10, got {bad}")
        return value

    @model_validator(mode="after")
    def bootstrap_replicates(self) -> "RunConfig":
        if self.bootstrap == 1:
            raise ValueError("bootstrap needs B >= 2 replicates (0 disables it)")
        return self

    @model_validator(mode="after")
    def matching_single_cell(self) -> "RunConfig":
        if self.matching and (len(self.dgps) > 1 or len(self.sample_sizes) > 1):
            raise ValueError("matching mode takes exactly one design and one sample size")
        return self

    def echo(self) -> dict:
        """JSON-ready copy of the configuration."""
        return self.model_dump(mode="json")
