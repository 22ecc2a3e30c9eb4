"""Feature matrices and column standardization."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from ..core import MultiIndex

__all__ = ["FeatureMatrix", "NotStandardizedError", "standardize"]

logger = logging.getLogger(__name__)

#: Columns whose sample std is below this (relative to |mean|, floored at 1)
#: carry no information and are dropped by standardization.
_ZERO_VARIANCE_TOL = 1e-12


class NotStandardizedError(ValueError):
    """Raised when a model that needs standardized features gets raw ones."""


@dataclass(frozen=True)
class FeatureMatrix:
    """Per-subject feature rows with named columns and binary labels."""

    rows: np.ndarray
    columns: tuple[MultiIndex, ...]
    labels: np.ndarray
    standardized: bool = False
    subjects: Optional[tuple[str, ...]] = None
    dropped_columns: tuple[MultiIndex, ...] = ()

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        if rows.ndim != 2:
            raise ValueError("feature rows must form a 2-d matrix")
        if rows.shape[1] != len(self.columns):
            raise ValueError(
                f"{rows.shape[1]} columns in matrix but {len(self.columns)} names"
            )
        if labels.shape != (rows.shape[0],):
            raise ValueError("labels must have one entry per row")
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        if not np.all(np.isfinite(rows)):
            raise ValueError("feature values must be finite")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "columns", tuple(self.columns))

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def n_columns(self) -> int:
        return self.rows.shape[1]

    def select(self, column_indices: Sequence[int]) -> "FeatureMatrix":
        idx = list(column_indices)
        return replace(
            self,
            rows=self.rows[:, idx],
            columns=tuple(self.columns[i] for i in idx),
        )

    def require_standardized(self, what: str) -> None:
        if not self.standardized:
            raise NotStandardizedError(
                f"{what} requires standardized features; call standardize() first"
            )


def standardize(matrix: FeatureMatrix) -> FeatureMatrix:
    """Scale each column to zero mean and unit sample standard deviation.

    Zero-variance columns cannot be scaled; they are dropped and recorded on
    the result.  Already-standardized input passes through unchanged, so the
    operation is idempotent.
    """
    if matrix.standardized:
        return matrix
    means = matrix.rows.mean(axis=0)
    stds = matrix.rows.std(axis=0, ddof=1) if matrix.n_rows > 1 else np.zeros(matrix.n_columns)
    keep = stds > _ZERO_VARIANCE_TOL * np.maximum(1.0, np.abs(means))
    dropped = tuple(name for name, kept in zip(matrix.columns, keep) if not kept)
    if dropped:
        logger.info(
            "dropping %d zero-variance feature column(s): %s",
            len(dropped),
            ", ".join(map(str, dropped)),
        )
    scaled = (matrix.rows[:, keep] - means[keep]) / stds[keep]
    return replace(
        matrix,
        rows=scaled,
        columns=tuple(name for name, kept in zip(matrix.columns, keep) if kept),
        standardized=True,
        dropped_columns=matrix.dropped_columns + dropped,
    )


def standardization_stats(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(means, stds, keep mask) as used by :func:`standardize`, for fold-local fits."""
    rows = np.asarray(rows, dtype=float)
    means = rows.mean(axis=0)
    stds = rows.std(axis=0, ddof=1) if rows.shape[0] > 1 else np.zeros(rows.shape[1])
    keep = stds > _ZERO_VARIANCE_TOL * np.maximum(1.0, np.abs(means))
    return means, stds, keep


def apply_standardization(
    rows: np.ndarray, means: np.ndarray, stds: np.ndarray, keep: np.ndarray
) -> np.ndarray:
    return (np.asarray(rows, dtype=float)[:, keep] - means[keep]) / stds[keep]
