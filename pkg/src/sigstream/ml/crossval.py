"""Nested, stratified cross-validation with leak-free resampling.

The outer folds estimate generalization error; within each outer training
set an inner stratified CV picks the hyperparameter grid point (ties go to
the lowest grid index).  When ``smote_inside_folds`` is on, standardization
statistics and SMOTE neighbours are computed from training rows only, per
fold, so no test row ever leaks into the fit; turning it off evaluates a
matrix that was balanced and standardized up front.

Predictions are pooled over the outer folds and scored once, matching how
small-sample studies report a single metric row per model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..rng import substream
from .classifiers import fit_elastic_net, fit_linear_svm, knn_predict
from .features import (
    FeatureMatrix,
    apply_standardization,
    standardization_stats,
)
from .metrics import MetricBundle, compute_metrics
from .sampling import balance_classes

__all__ = [
    "ConfigError",
    "CVConfig",
    "CVOutcome",
    "FoldAudit",
    "GridPoint",
    "default_grid",
    "stratified_folds",
    "nested_cv",
    "CLASSIFIER_NAMES",
]

CLASSIFIER_NAMES = ("logistic", "svm", "knn")

#: Hyperparameter grids used when the caller does not supply one.  The l1/l2
#: penalty and SVM cost sweep 10 points on a log scale.
_LAMBDA_GRID = tuple(float(x) for x in np.logspace(-3, 1, 10))
_RHO_GRID = (0.2, 0.5, 0.8)
_COST_GRID = tuple(float(x) for x in np.logspace(-2, 3, 10))
_K_GRID = (1, 3, 5, 7)

#: Iteration budget for SVM fits inside the inner ranking loop; the final
#: per-fold fit after selection runs the full default budget.
_SVM_RANKING_ITER = 600


class ConfigError(ValueError):
    """Raised for infeasible cross-validation or pipeline configuration."""


@dataclass(frozen=True)
class CVConfig:
    outer_folds: int = 6
    inner_folds: int = 3
    stratified: bool = True
    seed: int = 0
    smote_inside_folds: bool = True
    smote_k: int = 5
    smote_adasyn: bool = True

    def __post_init__(self) -> None:
        if self.outer_folds < 2 or self.inner_folds < 2:
            raise ConfigError(
                f"folds must be >= 2, got outer={self.outer_folds}, inner={self.inner_folds}"
            )
        if not self.stratified:
            raise ConfigError("only stratified resampling is supported")


GridPoint = dict[str, float]


def default_grid(classifier: str) -> list[GridPoint]:
    if classifier == "logistic":
        return [
            {"lam": lam, "rho": rho} for lam in _LAMBDA_GRID for rho in _RHO_GRID
        ]
    if classifier == "svm":
        return [{"cost": cost} for cost in _COST_GRID]
    if classifier == "knn":
        return [{"k": k} for k in _K_GRID]
    raise ConfigError(
        f"unknown classifier {classifier!r}; expected one of {CLASSIFIER_NAMES}"
    )


def stratified_folds(
    labels: np.ndarray, n_folds: int, rng: np.random.Generator
) -> list[np.ndarray]:
    """Disjoint test-fold index sets with per-class proportions preserved.

    Within each class the (seeded) shuffled indices are dealt round-robin, so
    every fold gets at least one sample of each class when counts allow.
    """
    labels = np.asarray(labels, dtype=int)
    folds: list[list[int]] = [[] for _ in range(n_folds)]
    for cls in (0, 1):
        members = np.flatnonzero(labels == cls)
        if members.size < n_folds:
            raise ConfigError(
                f"class {cls} has {members.size} samples, fewer than {n_folds} folds"
            )
        members = members[rng.permutation(members.size)]
        for pos, idx in enumerate(members):
            folds[pos % n_folds].append(int(idx))
    return [np.array(sorted(fold), dtype=int) for fold in folds]


@dataclass(frozen=True)
class FoldAudit:
    """What one outer fold actually used; consumed by leak-audit tests."""

    fold_index: int
    train_indices: np.ndarray
    test_indices: np.ndarray
    chosen: GridPoint
    standardization_means: Optional[np.ndarray]
    standardization_stds: Optional[np.ndarray]
    train_rows_after_sampling: np.ndarray
    train_labels_after_sampling: np.ndarray


@dataclass(frozen=True)
class CVOutcome:
    metrics: MetricBundle
    predictions: np.ndarray
    scores: np.ndarray
    chosen_per_fold: tuple[GridPoint, ...]


def _fit_predict(
    classifier: str,
    point: GridPoint,
    train_rows: np.ndarray,
    train_labels: np.ndarray,
    test_rows: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    if classifier == "logistic":
        model = fit_elastic_net(train_rows, train_labels, point["lam"], point["rho"])
        scores = model.decision_scores(test_rows)
        return (scores >= 0).astype(int), scores
    if classifier == "svm":
        model = fit_linear_svm(train_rows, train_labels, point["cost"])
        scores = model.decision_scores(test_rows)
        return (scores >= 0).astype(int), scores
    if classifier == "knn":
        k = min(int(point["k"]), train_rows.shape[0])
        return knn_predict(train_rows, train_labels, test_rows, k)
    raise ConfigError(f"unknown classifier {classifier!r}")


def _grid_predictions(
    classifier: str,
    grid: Sequence[GridPoint],
    train_rows: np.ndarray,
    train_labels: np.ndarray,
    test_rows: np.ndarray,
) -> list[np.ndarray]:
    """Predicted labels on ``test_rows`` for every grid point, in grid order.

    Elastic-net points sharing an l1 ratio are solved strongest-penalty-first
    with warm starts; the result is the same fixed point each solve would
    reach from zeros, just cheaper along the grid.
    """
    if classifier == "logistic":
        predictions: list[np.ndarray] = [np.empty(0)] * len(grid)
        by_rho: dict[float, list[int]] = {}
        for idx, point in enumerate(grid):
            by_rho.setdefault(point["rho"], []).append(idx)
        for rho, indices in by_rho.items():
            init = None
            for idx in sorted(indices, key=lambda i: -grid[i]["lam"]):
                model = fit_elastic_net(
                    train_rows, train_labels, grid[idx]["lam"], rho, init=init
                )
                init = (model.weights, model.intercept)
                predictions[idx] = (model.decision_scores(test_rows) >= 0).astype(int)
        return predictions
    if classifier == "svm":
        out = []
        for point in grid:
            model = fit_linear_svm(
                train_rows, train_labels, point["cost"], max_iter=_SVM_RANKING_ITER
            )
            out.append((model.decision_scores(test_rows) >= 0).astype(int))
        return out
    return [
        _fit_predict(classifier, point, train_rows, train_labels, test_rows)[0]
        for point in grid
    ]


def _prepare_fold(
    rows: np.ndarray,
    labels: np.ndarray,
    train_idx: np.ndarray,
    test_idx: np.ndarray,
    config: CVConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, Optional[np.ndarray], Optional[np.ndarray]]:
    """Training rows/labels and transformed test rows for one fold.

    In leak-free mode both the standardization statistics and the SMOTE
    neighbourhood come from the training rows alone.
    """
    train_rows = rows[train_idx]
    train_labels = labels[train_idx]
    test_rows = rows[test_idx]
    if not config.smote_inside_folds:
        return train_rows, train_labels, test_rows, None, None
    means, stds, keep = standardization_stats(train_rows)
    train_std = apply_standardization(train_rows, means, stds, keep)
    test_std = apply_standardization(test_rows, means, stds, keep)
    balanced_rows, balanced_labels = balance_classes(
        train_std,
        train_labels,
        k=config.smote_k,
        adasyn_weighting=config.smote_adasyn,
        rng=rng,
    )
    return balanced_rows, balanced_labels, test_std, means, stds


def nested_cv(
    matrix: FeatureMatrix,
    classifier: str,
    grid: Optional[Sequence[GridPoint]] = None,
    config: CVConfig = CVConfig(),
    audit: Optional[Callable[[FoldAudit], None]] = None,
) -> CVOutcome:
    """Nested stratified CV of one classifier; metrics pooled over outer folds."""
    if classifier not in CLASSIFIER_NAMES:
        raise ConfigError(
            f"unknown classifier {classifier!r}; expected one of {CLASSIFIER_NAMES}"
        )
    if grid is None:
        grid = default_grid(classifier)
    if not grid:
        raise ConfigError("hyperparameter grid must not be empty")
    if not config.smote_inside_folds and not matrix.standardized:
        raise ConfigError(
            "pre-balanced mode expects an already standardized matrix"
        )

    rows, labels = matrix.rows, matrix.labels
    outer = stratified_folds(
        labels, config.outer_folds, substream(config.seed, "cv", "outer", classifier)
    )
    predictions = np.empty(labels.shape[0], dtype=int)
    scores = np.empty(labels.shape[0])
    chosen: list[GridPoint] = []

    for fold_index, test_idx in enumerate(outer):
        train_idx = np.setdiff1d(np.arange(labels.shape[0]), test_idx)

        # Inner loop: rank grid points by pooled accuracy on inner test folds.
        inner_labels = labels[train_idx]
        inner_folds = stratified_folds(
            inner_labels,
            config.inner_folds,
            substream(config.seed, "cv", "inner", classifier, fold_index),
        )
        hits = np.zeros(len(grid))
        for inner_index, inner_test in enumerate(inner_folds):
            inner_train = np.setdiff1d(np.arange(train_idx.size), inner_test)
            fit_rows, fit_labels, eval_rows, _, _ = _prepare_fold(
                rows[train_idx],
                inner_labels,
                inner_train,
                inner_test,
                config,
                substream(config.seed, "smote", classifier, fold_index, inner_index),
            )
            truth = inner_labels[inner_test]
            for grid_index, pred in enumerate(
                _grid_predictions(classifier, grid, fit_rows, fit_labels, eval_rows)
            ):
                hits[grid_index] += int((pred == truth).sum())
        best = grid[int(np.argmax(hits))]
        chosen.append(best)

        fit_rows, fit_labels, eval_rows, means, stds = _prepare_fold(
            rows,
            labels,
            train_idx,
            test_idx,
            config,
            substream(config.seed, "smote", classifier, fold_index),
        )
        pred, score = _fit_predict(classifier, best, fit_rows, fit_labels, eval_rows)
        predictions[test_idx] = pred
        scores[test_idx] = score
        if audit is not None:
            audit(
                FoldAudit(
                    fold_index=fold_index,
                    train_indices=train_idx,
                    test_indices=test_idx,
                    chosen=best,
                    standardization_means=means,
                    standardization_stds=stds,
                    train_rows_after_sampling=fit_rows,
                    train_labels_after_sampling=fit_labels,
                )
            )

    return CVOutcome(
        metrics=compute_metrics(labels, predictions, scores),
        predictions=predictions,
        scores=scores,
        chosen_per_fold=tuple(chosen),
    )
