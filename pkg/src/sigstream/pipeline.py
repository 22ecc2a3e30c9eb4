"""End-to-end orchestration: streams -> paths -> signatures -> classifiers.

Also provides a synthetic two-group delay generator standing in for the
(non-public) clinical stream data: weekly response delays drawn from a
negative binomial per group, with seeded missingness that never exceeds two
consecutive gaps.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import multi_indices, signature, term_count
from .embeddings import EmbeddingConfig, InvalidStreamError, StreamRecord, embed_record
from .ml import (
    CLASSIFIER_NAMES,
    ConfigError,
    CVConfig,
    FeatureMatrix,
    balance_classes,
    default_grid,
    fit_elastic_net,
    nested_cv,
    standardize,
    stratified_folds,
)
from .report import ClassificationReport, DepthFeatures
from .rng import substream

__all__ = [
    "PipelineConfig",
    "SynthConfig",
    "featurize",
    "synth_generate",
    "run_experiment",
    "apply_ingest_rules",
    "MAX_CONSECUTIVE_MISSING",
]

logger = logging.getLogger(__name__)

#: Subjects with longer missing runs are excluded at ingestion.
MAX_CONSECUTIVE_MISSING = 2


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a full experiment run needs, under one master seed."""

    depths: tuple[int, ...] = (2, 3, 4)
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    cv: CVConfig = field(default_factory=CVConfig)
    classifiers: tuple[str, ...] = CLASSIFIER_NAMES
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.depths:
            raise ConfigError("at least one truncation depth is required")
        for depth in self.depths:
            if not 1 <= depth <= 10:
                raise ConfigError(f"depth must be in 1..10, got {depth}")
        if not self.classifiers:
            raise ConfigError("at least one classifier is required")
        for name in self.classifiers:
            if name not in CLASSIFIER_NAMES:
                raise ConfigError(
                    f"unknown classifier {name!r}; expected one of {CLASSIFIER_NAMES}"
                )
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        # One seed drives everything, including fold assignment.
        object.__setattr__(self, "cv", replace(self.cv, seed=self.seed))


@dataclass(frozen=True)
class SynthConfig:
    """Two-group synthetic delay streams (negative-binomial weekly delays)."""

    n0: int = 18
    n1: int = 11
    weeks: int = 13
    delay_mean0: float = 1.0
    delay_mean1: float = 6.0
    dispersion: float = 3.0
    missing_prob: float = 0.15
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n0 < 1 or self.n1 < 1:
            raise ConfigError("both groups need at least one subject")
        if self.weeks < 2:
            raise ConfigError(f"need at least 2 weeks, got {self.weeks}")
        if self.delay_mean0 < 0 or self.delay_mean1 < 0:
            raise ConfigError("delay means must be >= 0")
        if self.dispersion <= 0:
            raise ConfigError("dispersion must be > 0")
        if not 0.0 <= self.missing_prob < 1.0:
            raise ConfigError(
                f"missing probability must be in [0, 1), got {self.missing_prob}"
            )
        if self.missing_prob > 0.0 and self.weeks < 4:
            raise ConfigError(
                "missing values with fewer than 4 weeks cannot guarantee two "
                "observed values under the consecutive-gap limit"
            )


def featurize(
    records: Sequence[StreamRecord],
    depth: int,
    embedding: EmbeddingConfig = EmbeddingConfig(),
    scale: bool = True,
    workers: int = 1,
) -> FeatureMatrix:
    """Signature feature matrix: one row per record, one column per multi-index.

    The constant coefficient (always 1) is excluded.  With ``scale`` the
    columns are standardized and zero-variance columns dropped; pass
    ``scale=False`` to inspect raw coefficients or to let a cross-validation
    loop standardize per fold.
    """
    if not records:
        raise InvalidStreamError("no records to featurize")
    for pos, record in enumerate(records):
        if record.observed_count < 2:
            name = record.subject if record.subject is not None else f"#{pos}"
            raise InvalidStreamError(
                f"record {name}: needs at least 2 observed values, "
                f"has {record.observed_count}"
            )

    def one_row(record: StreamRecord) -> np.ndarray:
        path = embed_record(record, embedding)
        return signature(path, depth).coefficients[1:]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one_row, records))
    else:
        rows = [one_row(record) for record in records]

    dimension = embedding.dimension
    columns = tuple(multi_indices(dimension, depth))
    labels = np.array(
        [record.label if record.label is not None else 0 for record in records],
        dtype=int,
    )
    subjects = tuple(
        record.subject if record.subject is not None else str(pos)
        for pos, record in enumerate(records)
    )
    matrix = FeatureMatrix(
        rows=np.vstack(rows), columns=columns, labels=labels, subjects=subjects
    )
    return standardize(matrix) if scale else matrix


def _missing_mask(weeks: int, prob: float, rng: np.random.Generator) -> np.ndarray:
    """Bernoulli mask with the first week observed and gaps capped at two."""
    mask = np.zeros(weeks, dtype=bool)
    run = 0
    for week in range(1, weeks):
        if run < MAX_CONSECUTIVE_MISSING and rng.random() < prob:
            mask[week] = True
            run += 1
        else:
            run = 0
    return mask


def synth_generate(config: SynthConfig) -> list[StreamRecord]:
    """Seeded synthetic cohort; same config always yields the same records."""
    records = []
    total = config.n0 + config.n1
    width = max(3, len(str(total - 1)))
    for idx in range(total):
        label = 0 if idx < config.n0 else 1
        mean = config.delay_mean0 if label == 0 else config.delay_mean1
        rng = substream(config.seed, "synth", idx)
        r = config.dispersion
        if mean > 0:
            delays = rng.negative_binomial(r, r / (r + mean), size=config.weeks)
        else:
            delays = np.zeros(config.weeks)
        mask = _missing_mask(config.weeks, config.missing_prob, rng)
        values = delays.astype(float)
        values[mask] = 0.0  # masked entries carry no information
        records.append(
            StreamRecord(
                values=values,
                missing=mask,
                times=np.arange(1, config.weeks + 1, dtype=float),
                label=label,
                subject=f"s{idx:0{width}d}",
            )
        )
    return records


def apply_ingest_rules(
    records: Sequence[StreamRecord],
) -> tuple[list[StreamRecord], list[str]]:
    """Drop subjects whose streams violate the completeness rules.

    Subjects with more than two consecutive missing weeks, with fewer than
    two observed values, or whose stream starts with a gap are excluded; the
    returned list names them so callers can report the exclusions.
    """
    kept: list[StreamRecord] = []
    excluded: list[str] = []
    for pos, record in enumerate(records):
        name = record.subject if record.subject is not None else f"#{pos}"
        if record.max_consecutive_missing() > MAX_CONSECUTIVE_MISSING:
            excluded.append(f"{name}: more than {MAX_CONSECUTIVE_MISSING} consecutive missing weeks")
        elif record.observed_count < 2:
            excluded.append(f"{name}: fewer than 2 observed values")
        elif bool(record.missing[0]):
            excluded.append(f"{name}: stream starts with a missing value")
        else:
            kept.append(record)
    if excluded:
        logger.info("excluded %d subject(s): %s", len(excluded), "; ".join(excluded))
    return kept, excluded


def _select_features(
    matrix: FeatureMatrix, cv: CVConfig, seed: int, depth: int
) -> tuple[tuple, ...]:
    """Elastic-net feature selection on the standardized full matrix.

    Grid points are ranked by pooled accuracy over seeded stratified folds
    (ties to the lowest grid index); the best point with a non-empty support
    on the full-data refit wins.  Falls back to all columns if every point
    shrinks the model away.
    """
    grid = default_grid("logistic")
    folds = stratified_folds(
        matrix.labels, cv.inner_folds, substream(seed, "selection", depth)
    )
    hits = np.zeros(len(grid))
    for test_idx in folds:
        train_idx = np.setdiff1d(np.arange(matrix.n_rows), test_idx)
        for grid_index, point in enumerate(grid):
            model = fit_elastic_net(
                matrix.rows[train_idx],
                matrix.labels[train_idx],
                point["lam"],
                point["rho"],
            )
            pred = (model.decision_scores(matrix.rows[test_idx]) >= 0).astype(int)
            hits[grid_index] += int((pred == matrix.labels[test_idx]).sum())
    for grid_index in np.argsort(-hits, kind="stable"):
        point = grid[int(grid_index)]
        model = fit_elastic_net(matrix.rows, matrix.labels, point["lam"], point["rho"])
        support = model.selected_features
        if support.size:
            return tuple(matrix.columns[i] for i in support)
    logger.info("feature selection found no non-empty support; keeping all columns")
    return tuple(matrix.columns)


def run_experiment(
    records: Sequence[StreamRecord], config: PipelineConfig
) -> ClassificationReport:
    """Full pipeline: featurize, balance, select features, nested CV, report.

    With ``cv.smote_inside_folds`` (the default) oversampling and
    standardization happen inside each cross-validation fold; switching it
    off balances and standardizes the whole matrix once, up front, which is
    simpler but lets test rows influence the fit.
    """
    labels = {record.label for record in records}
    if labels != {0, 1}:
        raise ConfigError(f"need both class labels 0 and 1, found {sorted(labels)}")

    cells = {}
    features: dict[int, DepthFeatures] = {}
    for depth in config.depths:
        raw = featurize(
            records, depth, config.embedding, scale=False, workers=config.workers
        )
        full_std = standardize(raw)
        if config.cv.smote_inside_folds:
            selection_basis = full_std
            cv_input = raw
        else:
            balanced_rows, balanced_labels = balance_classes(
                full_std.rows,
                full_std.labels,
                k=config.cv.smote_k,
                adasyn_weighting=config.cv.smote_adasyn,
                rng=substream(config.seed, "smote-upfront", depth),
            )
            selection_basis = FeatureMatrix(
                rows=balanced_rows,
                columns=full_std.columns,
                labels=balanced_labels,
                standardized=True,
                dropped_columns=full_std.dropped_columns,
            )
            cv_input = selection_basis

        selected = _select_features(selection_basis, config.cv, config.seed, depth)
        features[depth] = DepthFeatures(
            depth=depth,
            selected=selected,
            total=term_count(config.embedding.dimension, depth),
            dropped_zero_variance=full_std.dropped_columns,
        )
        keep = [i for i, name in enumerate(cv_input.columns) if name in set(selected)]
        cv_matrix = cv_input.select(keep)

        for classifier in config.classifiers:
            try:
                outcome = nested_cv(cv_matrix, classifier, config=config.cv)
            except (ConfigError, ValueError) as exc:
                raise ConfigError(
                    f"classifier {classifier!r} at depth {depth}: {exc}"
                ) from exc
            cells[(classifier, depth)] = outcome.metrics

    return ClassificationReport(
        classifiers=config.classifiers,
        depths=config.depths,
        cells=cells,
        features=features,
    )
