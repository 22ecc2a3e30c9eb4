"""Linear classifiers over standardized signature features.

All three models are deterministic: the elastic-net logistic regression runs
cyclic coordinate descent inside an IRLS loop until the penalized objective
moves by less than a fixed tolerance, the linear SVM runs full-batch
subgradient descent from zeros on a fixed step schedule (returning the best
of the suffix average and the best visited iterate), and k-NN breaks distance
ties by row index and vote ties by the nearest neighbour's class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import FeatureMatrix

__all__ = [
    "LinearModel",
    "elastic_net_logistic",
    "fit_elastic_net",
    "linear_svm",
    "fit_linear_svm",
    "knn",
    "knn_predict",
    "svm_objective",
]

_ENET_TOL = 1e-8
_ENET_MAX_OUTER = 50
_ENET_MAX_SWEEPS = 100
_PROB_CLIP = 1e-5


@dataclass(frozen=True)
class LinearModel:
    """Fitted linear decision rule: scores are X @ weights + intercept."""

    weights: np.ndarray
    intercept: float
    objective: float
    n_iter: int

    def decision_scores(self, rows: np.ndarray) -> np.ndarray:
        return np.asarray(rows, dtype=float) @ self.weights + self.intercept

    def predict(self, rows: np.ndarray) -> np.ndarray:
        return (self.decision_scores(rows) >= 0).astype(int)

    @property
    def selected_features(self) -> np.ndarray:
        return np.flatnonzero(self.weights != 0.0)


def _logistic_objective(
    X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, lam: float, rho: float
) -> float:
    margins = y * (X @ w + b)
    # log(1 + exp(-m)) evaluated stably for both signs of m
    loss = np.logaddexp(0.0, -margins).mean()
    penalty = lam * (rho * np.abs(w).sum() + 0.5 * (1.0 - rho) * (w @ w))
    return float(loss + penalty)


def _soft_threshold(value: float, threshold: float) -> float:
    if value > threshold:
        return value - threshold
    if value < -threshold:
        return value + threshold
    return 0.0


def fit_elastic_net(
    X: np.ndarray,
    labels01: np.ndarray,
    lam: float,
    rho: float,
    init: tuple[np.ndarray, float] | None = None,
) -> LinearModel:
    """Elastic-net logistic regression on a raw (already scaled) array.

    Minimizes mean logistic loss + lam * (rho * l1 + (1 - rho)/2 * l2^2) by
    cyclic coordinate descent on the IRLS quadratic approximation; stops when
    the exact penalized objective changes by less than 1e-8.  ``init`` warm
    starts the solve (used when walking a penalty grid).
    """
    X = np.asarray(X, dtype=float)
    labels01 = np.asarray(labels01, dtype=int)
    if lam < 0:
        raise ValueError(f"penalty strength must be >= 0, got {lam}")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"l1 ratio must be in [0, 1], got {rho}")
    n, p = X.shape
    y = np.where(labels01 == 1, 1.0, -1.0)
    if init is None:
        w = np.zeros(p)
        b = 0.0
    else:
        w = init[0].copy()
        b = init[1]
    X_sq = X**2
    objective = _logistic_objective(X, y, w, b, lam, rho)
    outer = 0
    for outer in range(1, _ENET_MAX_OUTER + 1):
        eta = X @ w + b
        prob = 1.0 / (1.0 + np.exp(-eta))
        prob = np.clip(prob, _PROB_CLIP, 1.0 - _PROB_CLIP)
        weights_irls = prob * (1.0 - prob)
        z = eta + (labels01 - prob) / weights_irls

        residual = z - eta
        wx2 = weights_irls @ X_sq / n
        for _ in range(_ENET_MAX_SWEEPS):
            max_delta = 0.0
            for j in range(p):
                old = w[j]
                partial = (weights_irls * X[:, j]) @ residual / n + wx2[j] * old
                new = _soft_threshold(partial, lam * rho) / (wx2[j] + lam * (1.0 - rho))
                if new != old:
                    residual += X[:, j] * (old - new)
                    w[j] = new
                    max_delta = max(max_delta, abs(new - old))
            old_b = b
            b = b + (weights_irls @ residual) / weights_irls.sum()
            residual += old_b - b
            max_delta = max(max_delta, abs(b - old_b))
            if max_delta < 1e-9:
                break

        new_objective = _logistic_objective(X, y, w, b, lam, rho)
        if abs(objective - new_objective) < _ENET_TOL:
            objective = new_objective
            break
        objective = new_objective
    return LinearModel(weights=w, intercept=b, objective=objective, n_iter=outer)


def elastic_net_logistic(matrix: FeatureMatrix, lam: float, rho: float) -> LinearModel:
    """Public elastic-net fit; refuses raw features since the l1 selection
    would then depend on column scale."""
    matrix.require_standardized("elastic-net logistic regression")
    return fit_elastic_net(matrix.rows, matrix.labels, lam, rho)


def svm_objective(
    X: np.ndarray, y_pm: np.ndarray, w: np.ndarray, b: float, cost: float
) -> float:
    """Primal objective 0.5 * ||w||^2 + cost * sum(hinge)."""
    hinge = np.maximum(0.0, 1.0 - y_pm * (X @ w + b))
    return float(0.5 * (w @ w) + cost * hinge.sum())


def fit_linear_svm(
    X: np.ndarray, labels01: np.ndarray, cost: float, max_iter: int = 2000
) -> LinearModel:
    """Soft-margin linear SVM by deterministic full-batch subgradient descent.

    Starts from zeros and follows the 1/(lam * t) schedule for the scaled
    objective; the suffix average over the last quarter of the iterates and
    the best visited point are compared and the better one returned.
    """
    X = np.asarray(X, dtype=float)
    labels01 = np.asarray(labels01, dtype=int)
    if cost <= 0:
        raise ValueError(f"cost must be > 0, got {cost}")
    classes = np.unique(labels01)
    if classes.size < 2:
        raise ValueError("SVM needs both classes present in the training data")
    n, p = X.shape
    y = np.where(labels01 == 1, 1.0, -1.0)
    lam = 1.0 / (n * cost)

    w = np.zeros(p)
    b = 0.0
    best_w, best_b = w.copy(), b
    best_obj = svm_objective(X, y, w, b, cost)
    tail_start = max_iter - max_iter // 4
    tail_w = np.zeros(p)
    tail_b = 0.0
    tail_n = 0
    for t in range(1, max_iter + 1):
        margins = y * (X @ w + b)
        obj = float(0.5 * (w @ w) + cost * np.maximum(0.0, 1.0 - margins).sum())
        if obj < best_obj:
            best_obj = obj
            best_w, best_b = w.copy(), b
        active = margins < 1.0
        grad_w = lam * w - (y[active] @ X[active]) / n
        grad_b = -y[active].sum() / n
        step = 1.0 / (lam * (t + 1))
        w = w - step * grad_w
        b = b - step * grad_b
        if t >= tail_start:
            tail_w += w
            tail_b += b
            tail_n += 1
    if tail_n:
        avg_w = tail_w / tail_n
        avg_b = tail_b / tail_n
        avg_obj = svm_objective(X, y, avg_w, avg_b, cost)
        if avg_obj < best_obj:
            best_obj = avg_obj
            best_w, best_b = avg_w, avg_b
    return LinearModel(weights=best_w, intercept=best_b, objective=best_obj, n_iter=max_iter)


def linear_svm(matrix: FeatureMatrix, cost: float, max_iter: int = 2000) -> LinearModel:
    matrix.require_standardized("linear SVM")
    return fit_linear_svm(matrix.rows, matrix.labels, cost, max_iter=max_iter)


def knn_predict(
    train_rows: np.ndarray,
    train_labels: np.ndarray,
    queries: np.ndarray,
    k: int,
) -> tuple[np.ndarray, np.ndarray]:
    """k-nearest-neighbour vote with deterministic tie handling.

    Returns (labels, scores) where the score is the positive fraction among
    the k neighbours, usable as a ranking statistic.
    """
    train_rows = np.asarray(train_rows, dtype=float)
    train_labels = np.asarray(train_labels, dtype=int)
    queries = np.asarray(queries, dtype=float)
    if train_rows.shape[0] == 0:
        raise ValueError("k-NN needs a non-empty training set")
    if not 1 <= k <= train_rows.shape[0]:
        raise ValueError(f"k must be in 1..{train_rows.shape[0]}, got {k}")
    d2 = ((queries[:, None, :] - train_rows[None, :, :]) ** 2).sum(axis=2)
    labels = np.empty(queries.shape[0], dtype=int)
    scores = np.empty(queries.shape[0])
    for i in range(queries.shape[0]):
        order = np.argsort(d2[i], kind="stable")[:k]
        votes = train_labels[order]
        positive = int(votes.sum())
        scores[i] = positive / k
        if 2 * positive == k:
            labels[i] = train_labels[order[0]]
        else:
            labels[i] = int(2 * positive > k)
    return labels, scores


def knn(
    matrix: FeatureMatrix, queries: np.ndarray, k: int
) -> tuple[np.ndarray, np.ndarray]:
    return knn_predict(matrix.rows, matrix.labels, queries, k)
