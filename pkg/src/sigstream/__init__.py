"""Signature features for discrete data streams.

Turns possibly-gappy scalar streams into piecewise-linear paths, computes
their truncated signatures (coordinate iterated integrals), and runs the
downstream classification pipeline: standardization, minority oversampling,
regularized linear models and nested stratified cross-validation.
"""

from .core import (
    IncompatibleSignaturesError,
    InvalidAxesError,
    InvalidPathError,
    MultiIndex,
    Path,
    ShuffleExpansion,
    TruncatedSignature,
    chen_product,
    format_multi_index,
    multi_indices,
    shuffle,
    signature,
    signature_oracle,
    signed_area,
    term_count,
)
from .embeddings import (
    EmbeddingConfig,
    InvalidStreamError,
    StreamRecord,
    axis_path,
    delay_path,
    embed_record,
    feed_forward_fill,
    lead_lag,
    linear_path,
    missing_lift,
)
from .ml import (
    CVConfig,
    FeatureMatrix,
    MetricBundle,
    balance_classes,
    compute_metrics,
    elastic_net_logistic,
    knn,
    linear_svm,
    nested_cv,
    smote,
    standardize,
)
from .pipeline import (
    PipelineConfig,
    SynthConfig,
    apply_ingest_rules,
    featurize,
    run_experiment,
    synth_generate,
)
from .report import ClassificationReport

__version__ = "0.1.0"

__all__ = [
    "ClassificationReport",
    "CVConfig",
    "EmbeddingConfig",
    "FeatureMatrix",
    "IncompatibleSignaturesError",
    "InvalidAxesError",
    "InvalidPathError",
    "InvalidStreamError",
    "MetricBundle",
    "MultiIndex",
    "Path",
    "PipelineConfig",
    "ShuffleExpansion",
    "StreamRecord",
    "SynthConfig",
    "TruncatedSignature",
    "apply_ingest_rules",
    "axis_path",
    "balance_classes",
    "chen_product",
    "compute_metrics",
    "delay_path",
    "elastic_net_logistic",
    "embed_record",
    "featurize",
    "feed_forward_fill",
    "format_multi_index",
    "knn",
    "lead_lag",
    "linear_path",
    "linear_svm",
    "missing_lift",
    "multi_indices",
    "nested_cv",
    "run_experiment",
    "shuffle",
    "signature",
    "signature_oracle",
    "signed_area",
    "smote",
    "standardize",
    "synth_generate",
    "term_count",
    "__version__",
]
