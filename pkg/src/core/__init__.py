"""
Core package.

Provides configuration, the exception hierarchy, RNG substreams and the
ordered parallel map.
"""

from .config import Config
from .exceptions import (
    EXIT_NUMERIC,
    EXIT_VALIDATION,
    NumericError,
    UqpeError,
    ValidationError,
    stage_label,
)
from .parallel import ordered_map
from .rng import GENERATOR_NAME, child_generator, derive_seed

__all__ = [
    # Config
    "Config",
    # Errors
    "UqpeError",
    "ValidationError",
    "NumericError",
    "EXIT_VALIDATION",
    "EXIT_NUMERIC",
    "stage_label",
    # Parallelism
    "ordered_map",
    # RNG
    "GENERATOR_NAME",
    "child_generator",
    "derive_seed",
]
