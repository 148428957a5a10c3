"""Tests for dataset construction and CSV ingestion."""

import numpy as np
import pytest

from src.core.exceptions import (
    EmptyFileError,
    InvalidDatasetError,
    MissingColumnError,
    NonNumericCellError,
    RowWithMissingValueError,
)
from src.models import Dataset
from src.services.dataset_io import dataset_frame, load_csv, write_csv


def write(tmp_path, text: str):
    path = tmp_path / "data.csv"
    path.write_text(text, encoding="utf-8")
    return path


class TestDataset:
    """Tests for the in-memory Dataset type."""

    def test_from_columns_layout(self):
        """Controls sit between the intercept and the target column."""
        data = Dataset.from_columns(
            [1.0, 2.0, 3.0, 4.0],
            [5.0, 6.0, 7.0, 9.0],
            [[0.5, 0.1, 0.3, 0.2]],
            target_name="income",
            control_names=["age"],
            outcome_name="food",
        )
        assert data.column_names == ("intercept", "age", "income")
        assert data.target_index == 2
        assert data.target_name == "income"
        assert data.control_names == ("age",)
        assert data.n == 4 and data.d == 3
        np.testing.assert_array_equal(data.x[:, 0], np.ones(4))
        np.testing.assert_array_equal(data.target, [5.0, 6.0, 7.0, 9.0])

    def test_too_few_rows_rejected(self):
        """A single observation cannot identify intercept and slope."""
        with pytest.raises(InvalidDatasetError):
            Dataset.from_columns([1.0], [2.0])

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidDatasetError):
            Dataset.from_columns([1.0, np.nan, 3.0], [1.0, 2.0, 3.0])

    def test_intercept_column_required(self):
        x = np.column_stack([np.full(4, 2.0), np.arange(4.0)])
        with pytest.raises(InvalidDatasetError):
            Dataset(y=np.arange(4.0), x=x, target_index=1, column_names=("c", "x"))

    def test_target_cannot_be_intercept(self):
        x = np.column_stack([np.ones(4), np.arange(4.0)])
        with pytest.raises(InvalidDatasetError):
            Dataset(y=np.arange(4.0), x=x, target_index=0, column_names=("intercept", "x"))

    def test_arrays_are_read_only(self, line_dataset):
        with pytest.raises(ValueError):
            line_dataset.y[0] = 99.0

    def test_resample_keeps_rows_paired(self, line_dataset):
        """Resampled rows keep y and x aligned."""
        sample = line_dataset.resample([3, 3, 0, 7])
        np.testing.assert_array_equal(sample.y, line_dataset.y[[3, 3, 0, 7]])
        np.testing.assert_array_equal(sample.x, line_dataset.x[[3, 3, 0, 7]])
        assert sample.target_index == line_dataset.target_index


class TestLoadCsv:
    """Tests for load_csv error reporting and parsing."""

    def test_load_with_controls(self, tmp_path):
        """Whitespace around cells and scientific notation are accepted."""
        path = write(tmp_path, "y, x, w\n1.5, 2, 3\n2.5, 1e1, 4\n3.0, 7, -1\n4.0, 8, 0\n")
        data = load_csv(path, "y", "x", ["w"])
        assert data.column_names == ("intercept", "w", "x")
        np.testing.assert_allclose(data.target, [2.0, 10.0, 7.0, 8.0])
        np.testing.assert_allclose(data.y, [1.5, 2.5, 3.0, 4.0])

    def test_missing_column(self, tmp_path):
        path = write(tmp_path, "y,x\n1,2\n2,3\n3,5\n")
        with pytest.raises(MissingColumnError) as exc_info:
            load_csv(path, "y", "income")
        assert exc_info.value.code == "MissingColumn"
        assert exc_info.value.exit_code == 2
        assert exc_info.value.details["missing"] == ["income"]

    def test_missing_value_names_row_and_column(self, tmp_path):
        path = write(tmp_path, "y,x\n1,2\n2,NA\n3,5\n4,6\n")
        with pytest.raises(RowWithMissingValueError) as exc_info:
            load_csv(path, "y", "x")
        assert exc_info.value.details == {"row": 2, "column": "x"}

    def test_drop_na(self, tmp_path):
        """--drop-na removes incomplete rows instead of failing."""
        path = write(tmp_path, "y,x\n1,2\n2,\n3,5\n4,6\n")
        data = load_csv(path, "y", "x", drop_na=True)
        assert data.n == 3
        np.testing.assert_allclose(data.y, [1.0, 3.0, 4.0])

    def test_non_numeric_cell(self, tmp_path):
        path = write(tmp_path, "y,x\n1,2\n2,abc\n3,5\n")
        with pytest.raises(NonNumericCellError) as exc_info:
            load_csv(path, "y", "x")
        assert exc_info.value.details["row"] == 2
        assert exc_info.value.details["value"] == "abc"

    def test_empty_file(self, tmp_path):
        with pytest.raises(EmptyFileError):
            load_csv(write(tmp_path, ""), "y", "x")

    def test_header_only(self, tmp_path):
        with pytest.raises(EmptyFileError):
            load_csv(write(tmp_path, "y,x\n"), "y", "x")

    def test_single_row_rejected(self, tmp_path):
        with pytest.raises(InvalidDatasetError):
            load_csv(write(tmp_path, "y,x\n1,2\n"), "y", "x")

    def test_write_csv_reads_back(self, tmp_path, control_dataset):
        """write_csv is the inverse of load_csv at full precision."""
        path = write_csv(control_dataset, tmp_path / "out" / "sample.csv")
        loaded = load_csv(path, "y", "x", ["w"])
        np.testing.assert_array_equal(loaded.y, control_dataset.y)
        np.testing.assert_array_equal(loaded.x, control_dataset.x)
        assert list(dataset_frame(loaded).columns) == ["y", "w", "x"]
