"""
Shared enumerations.

String enums so values serialize directly into JSON and CSV records.
"""

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):  # type: ignore[no-redef]
        def __str__(self) -> str:
            return str(self.value)


class KernelFamily(StrEnum):
    gaussian = "gaussian"


class SmoothingMethod(StrEnum):
    """Second-stage regression of matched slopes on the outcome."""

    nw = "nw"
    local_linear = "local-linear"
    global_linear = "global-linear"


class RifVariant(StrEnum):
    ols_linear = "ols-linear"
    ols_quadratic = "ols-quadratic"
    ols_cubic = "ols-cubic"
    logit = "logit"

    @property
    def degree(self) -> int | None:
        return {
            RifVariant.ols_linear: 1,
            RifVariant.ols_quadratic: 2,
            RifVariant.ols_cubic: 3,
        }.get(self)


class ErrorDistribution(StrEnum):
    """Law of the standardized structural error u (mean 0, variance 1)."""

    normal = "normal"
    chi2_standardized = "chi2-standardized"


class ExtraCovariate(StrEnum):
    none = "none"
    independent = "independent"
    correlated = "correlated"


class MatchBranch(StrEnum):
    """Which case of the matching rule assigned an observation."""

    below = "below"
    interior = "interior"
    above = "above"


class Command(StrEnum):
    estimate = "estimate"
    simulate = "simulate"
    match = "match"


class OutputFormat(StrEnum):
    json = "json"
    csv = "csv"


__all__ = [
    "KernelFamily",
    "SmoothingMethod",
    "RifVariant",
    "ErrorDistribution",
    "ExtraCovariate",
    "MatchBranch",
    "Command",
    "OutputFormat",
]
