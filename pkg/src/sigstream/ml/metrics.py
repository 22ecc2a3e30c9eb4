"""Binary classification metrics.

Metrics whose denominator is empty (no positive ground truth for
sensitivity, no negative for specificity, one-class scores for AUC) are
reported as NaN rather than silently coerced to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

__all__ = ["MetricBundle", "compute_metrics", "midranks"]


@dataclass(frozen=True)
class MetricBundle:
    sensitivity: float
    specificity: float
    accuracy: float
    f1: float
    auc: float
    kappa: float

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


METRIC_NAMES = tuple(f.name for f in fields(MetricBundle))


def midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the mean rank of their run."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.shape[0])
    i = 0
    while i < values.shape[0]:
        j = i
        while j + 1 < values.shape[0] and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _auc(labels: np.ndarray, scores: np.ndarray) -> float:
    """Rank-statistic AUC (tied scores get midranks)."""
    n_pos = int((labels == 1).sum())
    n_neg = labels.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        return math.nan
    ranks = midranks(scores)
    rank_sum = ranks[labels == 1].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def compute_metrics(
    true_labels: np.ndarray, predicted_labels: np.ndarray, scores: np.ndarray
) -> MetricBundle:
    y = np.asarray(true_labels, dtype=int)
    pred = np.asarray(predicted_labels, dtype=int)
    scores = np.asarray(scores, dtype=float)
    if not (y.shape == pred.shape == scores.shape):
        raise ValueError("labels, predictions and scores must have equal length")
    if y.shape[0] == 0:
        raise ValueError("metrics need at least one sample")

    tp = int(((y == 1) & (pred == 1)).sum())
    tn = int(((y == 0) & (pred == 0)).sum())
    fp = int(((y == 0) & (pred == 1)).sum())
    fn = int(((y == 1) & (pred == 0)).sum())
    n = y.shape[0]

    sensitivity = tp / (tp + fn) if (tp + fn) else math.nan
    specificity = tn / (tn + fp) if (tn + fp) else math.nan
    accuracy = (tp + tn) / n
    f1 = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) else math.nan

    expected = ((tp + fn) * (tp + fp) + (tn + fp) * (tn + fn)) / (n * n)
    kappa = (accuracy - expected) / (1.0 - expected) if expected < 1.0 else 0.0

    return MetricBundle(
        sensitivity=sensitivity,
        specificity=specificity,
        accuracy=accuracy,
        f1=f1,
        auc=_auc(y, scores),
        kappa=kappa,
    )
