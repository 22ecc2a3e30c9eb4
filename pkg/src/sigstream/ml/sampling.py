"""Synthetic minority oversampling (SMOTE, with optional ADASYN weighting).

New minority rows are convex combinations x + lam * (x_nn - x) of a minority
row and one of its k nearest minority neighbours, lam uniform in [0, 1].
Plain mode spreads generation evenly over minority rows; ADASYN weighting
concentrates it on rows whose neighbourhood (in the full data set) contains
many majority points, i.e. on the harder boundary regions.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..rng import substream

__all__ = ["CannotOversampleError", "smote", "balance_classes"]


class CannotOversampleError(ValueError):
    """Raised when the minority class is too small to interpolate."""


def _nearest_neighbors(points: np.ndarray, pool: np.ndarray, k: int) -> np.ndarray:
    """Indices into ``pool`` of the k nearest neighbours of each point.

    ``points`` must occupy the leading rows of ``pool``; row i excludes pool
    entry i (itself).  Distance ties resolve to the lower pool index.
    """
    d2 = ((points[:, None, :] - pool[None, :, :]) ** 2).sum(axis=2)
    neighbors = np.empty((points.shape[0], k), dtype=int)
    for i in range(points.shape[0]):
        order = np.argsort(d2[i], kind="stable")
        neighbors[i] = [j for j in order if j != i][:k]
    return neighbors


def _largest_remainder(weights: np.ndarray, total: int) -> np.ndarray:
    """Integer counts proportional to ``weights`` summing to ``total``.

    Remainder ties go to the lower index, keeping the allocation deterministic.
    """
    raw = weights / weights.sum() * total
    counts = np.floor(raw).astype(int)
    short = total - counts.sum()
    if short > 0:
        order = np.argsort(-(raw - counts), kind="stable")
        counts[order[:short]] += 1
    return counts


def smote(
    minority: np.ndarray,
    majority_count: int,
    k: int,
    seed: int = 0,
    adasyn_weighting: bool = False,
    majority: Optional[np.ndarray] = None,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Generate ``majority_count - len(minority)`` synthetic minority rows.

    ``majority`` (the majority-class rows) is only needed when
    ``adasyn_weighting`` is on, to measure how contested each minority row's
    neighbourhood is.  Pass ``rng`` to control the draws directly; otherwise a
    dedicated substream of ``seed`` is used.
    """
    minority = np.asarray(minority, dtype=float)
    if minority.ndim != 2 or minority.shape[0] < 2:
        raise CannotOversampleError(
            f"need at least 2 minority rows to interpolate, got {minority.shape[0]}"
        )
    n_minority = minority.shape[0]
    if not 1 <= k <= n_minority - 1:
        raise CannotOversampleError(
            f"k must be in 1..{n_minority - 1} (minority size - 1), got {k}"
        )
    n_new = majority_count - n_minority
    if n_new < 0:
        raise CannotOversampleError(
            f"majority count {majority_count} is below minority count {n_minority}"
        )
    if n_new == 0:
        return np.empty((0, minority.shape[1]))

    if adasyn_weighting:
        if majority is None:
            raise CannotOversampleError("ADASYN weighting needs the majority rows")
        majority = np.asarray(majority, dtype=float)
        pool = np.vstack([minority, majority])
        neighbors_full = _nearest_neighbors(minority, pool, k)
        hardness = (neighbors_full >= n_minority).mean(axis=1)
        weights = hardness if hardness.sum() > 0 else np.ones(n_minority)
    else:
        weights = np.ones(n_minority)
    per_row = _largest_remainder(weights, n_new)

    neighbors = _nearest_neighbors(minority, minority, k)
    if rng is None:
        rng = substream(seed, "smote")
    synthetic = np.empty((n_new, minority.shape[1]))
    pos = 0
    for i in range(n_minority):
        for _ in range(per_row[i]):
            nn = minority[neighbors[i, rng.integers(0, k)]]
            lam = rng.random()
            synthetic[pos] = minority[i] + lam * (nn - minority[i])
            pos += 1
    return synthetic


def balance_classes(
    rows: np.ndarray,
    labels: np.ndarray,
    k: int,
    seed: int = 0,
    adasyn_weighting: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Oversample the minority class until both classes have equal counts.

    Synthetic rows are appended after the originals, so existing row order
    (and anything keyed to it) is preserved.
    """
    rows = np.asarray(rows, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == n_neg:
        return rows, labels
    minority_label = 1 if n_pos < n_neg else 0
    minority = rows[labels == minority_label]
    majority = rows[labels != minority_label]
    k_eff = min(k, minority.shape[0] - 1)
    synthetic = smote(
        minority,
        majority.shape[0],
        k_eff,
        seed=seed,
        adasyn_weighting=adasyn_weighting,
        majority=majority,
        rng=rng,
    )
    out_rows = np.vstack([rows, synthetic])
    out_labels = np.concatenate([labels, np.full(synthetic.shape[0], minority_label)])
    return out_rows, out_labels
