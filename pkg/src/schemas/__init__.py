"""
Schemas package.

Re-exports all Pydantic schemas for convenient importing.
"""

from .config import DEFAULT_TAUS, SIMULATION_TAUS, RunConfig
from .records import (
    ESTIMATE_COLUMNS,
    CoverageRow,
    CqpeRecord,
    EstimateRecord,
    InferenceRecord,
    MatchingRow,
    MatchRow,
    RifRecord,
    SimulationRow,
    UqpeRecord,
)

__all__ = [
    # Configuration
    "RunConfig",
    "DEFAULT_TAUS",
    "SIMULATION_TAUS",
    # Estimate records
    "ESTIMATE_COLUMNS",
    "EstimateRecord",
    "UqpeRecord",
    "RifRecord",
    "CqpeRecord",
    "InferenceRecord",
    # Matching and simulation rows
    "MatchRow",
    "MatchingRow",
    "SimulationRow",
    "CoverageRow",
]
