"""Estimation dataset."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.exceptions import InvalidDatasetError

INTERCEPT = "intercept"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Outcome vector and covariate matrix, row-aligned.

    Column 0 of `x` is the intercept. `target_index` points at the scalar
    covariate whose partial effect is estimated; it is never 0 and callers
    must not assume it is the last column.
    """

    y: NDArray[np.float64]
    x: NDArray[np.float64]
    target_index: int
    column_names: tuple[str, ...]
    outcome_name: str = "y"

    def __post_init__(self) -> None:
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        y.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "column_names", tuple(self.column_names))
        self._validate()

    def _validate(self) -> None:
        y, x = self.y, self.x
        if y.ndim != 1 or x.ndim != 2:
            raise InvalidDatasetError("y must be a vector and x a matrix")
        n, d = x.shape
        if y.shape[0] != n:
            raise InvalidDatasetError(
                f"y has {y.shape[0]} rows but x has {n}", {"n_y": y.shape[0], "n_x": n}
            )
        if len(self.column_names) != d:
            raise InvalidDatasetError(
                f"{len(self.column_names)} column names for {d} columns"
            )
        if d < 2:
            raise InvalidDatasetError("x needs an intercept and a target column")
        if n < d + 1:
            raise InvalidDatasetError(
                f"Need at least d + 1 = {d + 1} rows, got {n}", {"n": n, "d": d}
            )
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
            raise InvalidDatasetError("All entries must be finite")
        if not np.all(x[:, 0] == 1.0):
            raise InvalidDatasetError("Column 0 must be the intercept constant 1")
        if not 1 <= self.target_index < d:
            raise InvalidDatasetError(
                f"target_index must lie in 1..{d - 1}, got {self.target_index}"
            )

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    @property
    def d(self) -> int:
        return int(self.x.shape[1])

    @property
    def target(self) -> NDArray[np.float64]:
        return self.x[:, self.target_index]

    @property
    def target_name(self) -> str:
        return self.column_names[self.target_index]

    @property
    def control_names(self) -> tuple[str, ...]:
        return tuple(
            name
            for j, name in enumerate(self.column_names)
            if j not in (0, self.target_index)
        )

    def resample(self, indices: ArrayLike) -> Dataset:
        """Rows at `indices`, kept paired (used by the pairwise bootstrap)."""
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(
            y=self.y[idx],
            x=self.x[idx],
            target_index=self.target_index,
            column_names=self.column_names,
            outcome_name=self.outcome_name,
        )

    @classmethod
    def from_columns(
        cls,
        y: ArrayLike,
        target: ArrayLike,
        controls: Sequence[ArrayLike] = (),
        *,
        target_name: str = "x",
        control_names: Sequence[str] | None = None,
        outcome_name: str = "y",
    ) -> Dataset:
        """Build a dataset laid out as [intercept, controls..., target]."""
        y_arr = np.asarray(y, dtype=np.float64)
        columns = [np.ones_like(y_arr)]
        columns += [np.asarray(c, dtype=np.float64) for c in controls]
        columns.append(np.asarray(target, dtype=np.float64))
        if control_names is None:
            control_names = [f"w{k + 1}" for k in range(len(controls))]
        if len(control_names) != len(controls):
            raise InvalidDatasetError("One name is needed per control column")
        names = (INTERCEPT, *control_names, target_name)
        return cls(
            y=y_arr,
            x=np.column_stack(columns),
            target_index=len(columns) - 1,
            column_names=names,
            outcome_name=outcome_name,
        )
