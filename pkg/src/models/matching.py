"""Matching results."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .base import MatchBranch


@dataclass(frozen=True, eq=False)
class MatchResult:
    """Per-observation matched level and matched slope at one tau.

    `xi_index[i]` is the grid row used for the slope lookup; `branch[i]`
    records which case of the matching rule applied. Observations on the
    `below` branch carry `xi = epsilon` but share row 0 for the slope.
    """

    tau: float
    q_tau: float
    xi: NDArray[np.float64]
    xi_index: NDArray[np.intp]
    matched_slope: NDArray[np.float64]
    branch: tuple[MatchBranch, ...]

    @property
    def n(self) -> int:
        return int(self.xi.shape[0])

    @property
    def lower_hits(self) -> int:
        return sum(1 for b in self.branch if b is MatchBranch.below)

    @property
    def upper_hits(self) -> int:
        return sum(1 for b in self.branch if b is MatchBranch.above)

    @property
    def boundary_hits(self) -> int:
        return self.lower_hits + self.upper_hits

    @property
    def boundary_share(self) -> float:
        return self.boundary_hits / self.n if self.n else 0.0

    def slope_range(self) -> tuple[float, float]:
        return float(np.min(self.matched_slope)), float(np.max(self.matched_slope))
