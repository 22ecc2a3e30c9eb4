"""Classification reports: one metric bundle per (classifier, depth).

The text rendering mirrors the usual summary-table layout for this kind of
study: classifiers across the top, truncation depths nested under each, and
one row per metric, headed by the selected/total feature counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .core import MultiIndex, format_multi_index
from .jsonutil import dumps
from .ml.metrics import METRIC_NAMES, MetricBundle

__all__ = ["DepthFeatures", "ClassificationReport"]

REPORT_SCHEMA_VERSION = "1"

#: Caveat embedded in every report so feature totals are not over-read.
FEATURE_COUNT_NOTE = (
    "total feature counts include every signature coefficient of the embedding "
    "up to the truncation depth (constant term excluded); columns with zero "
    "variance across subjects are dropped before any model fitting and listed "
    "under dropped_zero_variance. Externally quoted totals for similar analyses "
    "may be smaller if they pruned deterministic coefficients before counting."
)


@dataclass(frozen=True)
class DepthFeatures:
    """Feature bookkeeping for one truncation depth."""

    depth: int
    selected: tuple[MultiIndex, ...]
    total: int
    dropped_zero_variance: tuple[MultiIndex, ...] = ()

    def as_dict(self) -> dict:
        return {
            "selected": [format_multi_index(ix) for ix in self.selected],
            "selected_count": len(self.selected),
            "total": self.total,
            "dropped_zero_variance": [
                format_multi_index(ix) for ix in self.dropped_zero_variance
            ],
        }


@dataclass(frozen=True)
class ClassificationReport:
    """Metric bundles for every (classifier, depth) pair plus feature info."""

    classifiers: tuple[str, ...]
    depths: tuple[int, ...]
    cells: dict[tuple[str, int], MetricBundle]
    features: dict[int, DepthFeatures]
    manifest: Optional[dict] = None
    notes: tuple[str, ...] = (FEATURE_COUNT_NOTE,)

    def metric(self, classifier: str, depth: int) -> MetricBundle:
        return self.cells[(classifier, depth)]

    def as_dict(self) -> dict:
        body: dict = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "classifiers": list(self.classifiers),
            "depths": list(self.depths),
            "features": {
                str(depth): self.features[depth].as_dict() for depth in self.depths
            },
            "results": {
                classifier: {
                    str(depth): self.cells[(classifier, depth)].as_dict()
                    for depth in self.depths
                }
                for classifier in self.classifiers
            },
            "notes": list(self.notes),
        }
        if self.manifest is not None:
            body["manifest"] = self.manifest
        return body

    def to_json(self) -> str:
        return dumps(self.as_dict())

    def to_text(self) -> str:
        """Fixed-width summary table, classifiers x depths x metrics."""
        labels = {
            "logistic": "Logistic regression",
            "svm": "SVM",
            "knn": "kNN",
        }
        head = "number of features"
        name_width = max(
            len(head), max(len(_metric_label(m)) for m in METRIC_NAMES)
        )
        col_width = max(
            10,
            *(
                len(self._feature_cell(depth))
                for depth in self.depths
            ),
        )

        def fmt_row(name: str, cells: list[str]) -> str:
            body = " | ".join(
                " ".join(cell.ljust(col_width) for cell in group)
                for group in _chunks(cells, len(self.depths))
            )
            return f"{name.ljust(name_width)} | {body}"

        lines = []
        group_width = (col_width + 1) * len(self.depths) - 1
        header = " | ".join(
            labels.get(c, c).ljust(group_width) for c in self.classifiers
        )
        lines.append(f"{'Classifier'.ljust(name_width)} | {header}")
        depth_cells = [f"L={d}".ljust(col_width) for _ in self.classifiers for d in self.depths]
        lines.append(fmt_row("Signature depth", depth_cells))
        lines.append("-" * len(lines[0]))
        lines.append(
            fmt_row(
                head,
                [
                    self._feature_cell(depth)
                    for _ in self.classifiers
                    for depth in self.depths
                ],
            )
        )
        for metric in METRIC_NAMES:
            cells = [
                _fmt_metric(getattr(self.cells[(classifier, depth)], metric))
                for classifier in self.classifiers
                for depth in self.depths
            ]
            lines.append(fmt_row(_metric_label(metric), cells))
        return "\n".join(lines) + "\n"

    def _feature_cell(self, depth: int) -> str:
        info = self.features[depth]
        return f"{len(info.selected)} ({info.total})"


def _metric_label(name: str) -> str:
    return {"f1": "f1-score", "auc": "AUC", "kappa": "Cohen's kappa"}.get(name, name)


def _fmt_metric(value: float) -> str:
    return "n/a" if math.isnan(value) else f"{value:.2f}"


def _chunks(seq: list, size: int) -> list[list]:
    return [seq[i : i + size] for i in range(0, len(seq), size)]
