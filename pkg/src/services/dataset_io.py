"""
CSV ingestion and export for estimation datasets.

All file I/O for the numerics lives here. Cells are read as strings first so
that missing and non-numeric values can be reported with their row and
column instead of being coerced silently.
"""

import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd

from ..core.exceptions import (
    EmptyFileError,
    InvalidDatasetError,
    MissingColumnError,
    NonNumericCellError,
    RowWithMissingValueError,
)
from ..models import INTERCEPT, Dataset

logger = logging.getLogger(__name__)

MISSING_TOKENS = frozenset({"", "NA", "N/A", "NaN", "nan", "null", "NULL"})
FLOAT_FORMAT = "%.17g"


def load_csv(
    path: str | Path,
    outcome: str,
    target: str,
    controls: Sequence[str] = (),
    *,
    drop_na: bool = False,
) -> Dataset:
    """
    Load a dataset from a UTF-8 comma-separated file with a header row.

    Args:
        path: CSV file
        outcome: Outcome column name
        target: Target covariate column name
        controls: Additional covariate column names
        drop_na: Drop rows with a missing value in a selected column
            instead of failing

    Returns:
        Dataset laid out as [intercept, controls..., target]
    """
    path = Path(path)
    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        raise EmptyFileError(f"{path} is empty", {"path": str(path)}) from None

    selected = [outcome, *controls, target]
    if len(set(selected)) != len(selected):
        raise InvalidDatasetError(
            "Outcome, target and controls must be distinct columns",
            {"columns": selected},
        )
    missing = [name for name in selected if name not in frame.columns]
    if missing:
        raise MissingColumnError(
            f"Column(s) not found in {path.name}: {', '.join(missing)}",
            {"missing": missing, "available": list(frame.columns)},
        )
    if frame.empty:
        raise EmptyFileError(f"{path} has a header but no data rows", {"path": str(path)})

    frame = frame[selected].apply(lambda col: col.str.strip())
    is_missing = frame.isin(MISSING_TOKENS)
    incomplete = is_missing.any(axis=1)
    if incomplete.any():
        if not drop_na:
            row = int(np.flatnonzero(incomplete.to_numpy())[0])
            column = str(is_missing.columns[is_missing.iloc[row].to_numpy()][0])
            raise RowWithMissingValueError(row + 1, column)
        logger.warning(f"Dropping {int(incomplete.sum())} row(s) with missing values")
        frame = frame.loc[~incomplete]
        if frame.empty:
            raise EmptyFileError(f"{path} has no complete data rows", {"path": str(path)})

    numeric = frame.apply(pd.to_numeric, errors="coerce")
    for column in selected:
        bad = numeric[column].isna() | ~np.isfinite(numeric[column].to_numpy(dtype=float))
        if bad.any():
            label = bad.index[bad.to_numpy()][0]
            raise NonNumericCellError(int(label) + 1, column, str(frame.at[label, column]))

    dataset = Dataset.from_columns(
        numeric[outcome].to_numpy(dtype=np.float64),
        numeric[target].to_numpy(dtype=np.float64),
        [numeric[c].to_numpy(dtype=np.float64) for c in controls],
        target_name=target,
        control_names=list(controls),
        outcome_name=outcome,
    )
    logger.info(f"Loaded {dataset.n} rows and {dataset.d} columns from {path}")
    return dataset


def dataset_frame(dataset: Dataset) -> pd.DataFrame:
    """Dataset as a frame of the outcome and every non-intercept column."""
    columns = {dataset.outcome_name: dataset.y}
    for j, name in enumerate(dataset.column_names):
        if j == 0 and name == INTERCEPT:
            continue
        columns[name] = dataset.x[:, j]
    return pd.DataFrame(columns)


def write_csv(dataset: Dataset, path: str | Path) -> Path:
    """Write a dataset so that `load_csv` reads it back unchanged."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dataset_frame(dataset).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path
