"""
Configuration module for uqpe-match.

Centralized configuration management using environment variables.
An optional `.env` file in the working directory is loaded first.
"""

import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    """Application configuration class"""

    # Package metadata
    APP_NAME = "uqpe-match"
    VERSION = "0.1.0"

    # Logging Configuration
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

    # Parallelism (0 = one worker per CPU)
    THREADS = int(os.getenv("UQPE_THREADS", "0"))

    # Reproducibility
    DEFAULT_SEED = int(os.getenv("UQPE_SEED", "20240607"))
    ORACLE_SEED = int(os.getenv("UQPE_ORACLE_SEED", "777"))
    ORACLE_DRAWS = int(os.getenv("UQPE_ORACLE_DRAWS", "10000000"))

    # Quantile regression solver
    SOLVER_TOL = float(os.getenv("UQPE_SOLVER_TOL", "1e-8"))
    SOLVER_MAX_ITER = int(os.getenv("UQPE_SOLVER_MAX_ITER", "100"))

    # Share of clamped observations above which matching warns
    BOUNDARY_WARN = float(os.getenv("UQPE_BOUNDARY_WARN", "0.05"))

    @classmethod
    def resolve_threads(cls, threads: int | None = None) -> int:
        """Resolve a thread count: explicit value, then UQPE_THREADS, then CPUs."""
        value = cls.THREADS if threads is None else threads
        if value < 0:
            raise ValueError(f"threads must be >= 0, got {value}")
        if value == 0:
            return os.cpu_count() or 1
        return value
