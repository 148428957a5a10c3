from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

from src.main import cli  # noqa: E402
from src.models import Dataset, DgpSpec, QuantileProcessFit  # noqa: E402
from src.services.dataset_io import write_csv  # noqa: E402
from src.services.qr_process import default_grid  # noqa: E402
from src.services.simulation import draw_dgp  # noqa: E402


@pytest.fixture
def runner() -> CliRunner:
    """Click test runner with stdout and stderr captured separately."""
    return CliRunner()


@pytest.fixture
def invoke(runner: CliRunner) -> Callable:
    """Invoke the `uqpe` group with a list of arguments."""

    def _invoke(*args: str):
        return runner.invoke(cli, [str(a) for a in args], catch_exceptions=False)

    return _invoke


@pytest.fixture
def line_dataset() -> Dataset:
    """y = 2 + x exactly: every conditional quantile slope is 1."""
    x = np.linspace(1.0, 10.0, 60)
    return Dataset.from_columns(2.0 + x, x)


@pytest.fixture
def location_dataset() -> Dataset:
    """Seeded draw from the Gaussian location design (true UQPE = 1)."""
    return draw_dgp(DgpSpec(n=500, seed=11))


@pytest.fixture
def scale_dataset() -> Dataset:
    """Seeded draw from the Gaussian location-scale design."""
    return draw_dgp(DgpSpec.preset("locscale-normal", n=500, seed=5))


@pytest.fixture
def control_dataset() -> Dataset:
    """Location-scale design with an independent extra covariate w."""
    return draw_dgp(DgpSpec.preset("locscale-normal-w", n=400, seed=3))


@pytest.fixture
def line_csv(tmp_path: Path, line_dataset: Dataset) -> Path:
    return write_csv(line_dataset, tmp_path / "line.csv")


@pytest.fixture
def location_csv(tmp_path: Path, location_dataset: Dataset) -> Path:
    return write_csv(location_dataset, tmp_path / "location.csv")


@pytest.fixture
def process_fit() -> QuantileProcessFit:
    """Hand-built process on 3 levels: intercepts 0, 1, 2 and slopes 10, 20, 30."""
    return QuantileProcessFit(
        grid=default_grid(3),
        betas=np.array([[0.0, 10.0], [1.0, 20.0], [2.0, 30.0]]),
        crossing_count=0,
        rearranged=False,
        target_index=1,
        column_names=("intercept", "x"),
        objectives=np.zeros(3),
        iterations=np.zeros(3, dtype=np.int64),
        n=4,
    )
