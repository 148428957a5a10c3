"""
Models package.

Re-exports all domain types and enums for convenient importing.
"""

from .base import (
    Command,
    ErrorDistribution,
    ExtraCovariate,
    KernelFamily,
    MatchBranch,
    OutputFormat,
    RifVariant,
    SmoothingMethod,
)
from .dataset import INTERCEPT, Dataset
from .estimates import BootstrapResult, CqpeEstimate, RifEstimate, UqpeEstimate
from .matching import MatchResult
from .qr import QrFit, QuantileGrid, QuantileProcessFit
from .simulation import (
    DGP_PRESETS,
    DgpSpec,
    MatchingBand,
    SimulationCell,
    SimulationReport,
)

__all__ = [
    # Enums
    "KernelFamily",
    "SmoothingMethod",
    "RifVariant",
    "ErrorDistribution",
    "ExtraCovariate",
    "MatchBranch",
    "Command",
    "OutputFormat",
    # Data
    "INTERCEPT",
    "Dataset",
    # Quantile regression
    "QrFit",
    "QuantileGrid",
    "QuantileProcessFit",
    "MatchResult",
    # Estimates
    "UqpeEstimate",
    "RifEstimate",
    "CqpeEstimate",
    "BootstrapResult",
    # Simulation
    "DGP_PRESETS",
    "DgpSpec",
    "SimulationCell",
    "SimulationReport",
    "MatchingBand",
]
