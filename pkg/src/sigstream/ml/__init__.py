"""Imbalance correction, classifiers, cross-validation and metrics."""

from .classifiers import (
    LinearModel,
    elastic_net_logistic,
    fit_elastic_net,
    fit_linear_svm,
    knn,
    knn_predict,
    linear_svm,
)
from .crossval import (
    CLASSIFIER_NAMES,
    ConfigError,
    CVConfig,
    CVOutcome,
    FoldAudit,
    default_grid,
    nested_cv,
    stratified_folds,
)
from .features import FeatureMatrix, NotStandardizedError, standardize
from .metrics import METRIC_NAMES, MetricBundle, compute_metrics
from .sampling import CannotOversampleError, balance_classes, smote

__all__ = [
    "CLASSIFIER_NAMES",
    "METRIC_NAMES",
    "CVConfig",
    "CVOutcome",
    "CannotOversampleError",
    "ConfigError",
    "FeatureMatrix",
    "FoldAudit",
    "LinearModel",
    "MetricBundle",
    "NotStandardizedError",
    "balance_classes",
    "compute_metrics",
    "default_grid",
    "elastic_net_logistic",
    "fit_elastic_net",
    "fit_linear_svm",
    "knn",
    "knn_predict",
    "linear_svm",
    "nested_cv",
    "smote",
    "standardize",
    "stratified_folds",
]
