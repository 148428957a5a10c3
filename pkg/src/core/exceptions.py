"""
Exception hierarchy for uqpe-match.

Every error carries a stable `code` (the name used in CLI messages), an exit
code for the command-line surface, and a `details` dict. Validation problems
exit with 2, numerical failures with 3.
"""

from collections.abc import Iterator
from contextlib import contextmanager
from typing import Any

EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


class UqpeError(Exception):
    """Base exception for uqpe-match"""

    code = "UqpeError"

    def __init__(
        self,
        message: str,
        exit_code: int = EXIT_NUMERIC,
        details: dict[str, Any] | None = None,
    ):
        self.message = message
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(self.message)

    @property
    def stage(self) -> str | None:
        return self.details.get("stage")


class ValidationError(UqpeError):
    """Raised when inputs or options fail validation"""

    code = "ValidationError"

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        super().__init__(message, EXIT_VALIDATION, details)


class NumericError(UqpeError):
    """Raised when a numerical stage cannot produce a result"""

    code = "NumericError"

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        super().__init__(message, EXIT_NUMERIC, details)


# Data validation


class MissingColumnError(ValidationError):
    code = "MissingColumn"


class NonNumericCellError(ValidationError):
    code = "NonNumericCell"

    def __init__(self, row: int, column: str, value: str):
        super().__init__(
            f"Non-numeric value {value!r} in column {column!r} at data row {row}",
            {"row": row, "column": column, "value": value},
        )


class EmptyFileError(ValidationError):
    code = "EmptyFile"


class RowWithMissingValueError(ValidationError):
    code = "RowWithMissingValue"

    def __init__(self, row: int, column: str):
        super().__init__(
            f"Missing value in column {column!r} at data row {row} "
            "(pass --drop-na to drop incomplete rows)",
            {"row": row, "column": column},
        )


class InvalidDatasetError(ValidationError):
    code = "InvalidDataset"


# Option and argument validation


class InvalidLevelError(ValidationError):
    code = "InvalidLevel"


class GridTooSmallError(ValidationError):
    code = "GridTooSmall"


class GridMismatchError(ValidationError):
    code = "GridMismatch"


class InvalidBandwidthError(ValidationError):
    code = "InvalidBandwidth"


class OutOfGridRangeError(ValidationError):
    code = "OutOfGridRange"


class ScaleNonPositiveError(ValidationError):
    code = "ScaleNonPositive"


# Numerical failures


class RankDeficientDesignError(NumericError):
    code = "RankDeficientDesign"


class SolverDivergenceError(NumericError):
    code = "SolverDivergence"


class EmptyInputError(NumericError):
    code = "EmptyInput"


class DegenerateSampleError(NumericError):
    code = "DegenerateSample"


class ZeroWeightMassError(NumericError):
    code = "ZeroWeightMass"


class SingularLocalDesignError(NumericError):
    code = "SingularLocalDesign"


class ZeroDensityError(NumericError):
    code = "ZeroDensity"


class SeparationDetectedError(NumericError):
    code = "SeparationDetected"


class DegenerateIndicatorError(NumericError):
    code = "DegenerateIndicator"


class ReplicateFailureError(NumericError):
    code = "ReplicateFailure"

    def __init__(self, replicate: int, cause: UqpeError):
        super().__init__(
            f"Bootstrap replicate {replicate} failed twice: {cause.code}: {cause.message}",
            {"replicate": replicate, "cause": cause.code},
        )
        self.cause = cause


class OracleNotConvergedError(NumericError):
    code = "OracleNotConverged"


class InvariantViolationError(NumericError):
    code = "InvariantViolation"


class ReportInvalidError(NumericError):
    code = "ReportInvalid"


@contextmanager
def stage_label(stage: str) -> Iterator[None]:
    """Attach the pipeline stage name to any UqpeError raised inside the block.

    The innermost label wins, so nested stages report the most specific one.
    """
    try:
        yield
    except UqpeError as exc:
        exc.details.setdefault("stage", stage)
        raise
