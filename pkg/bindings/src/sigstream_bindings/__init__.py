"""Array-in, array-out surface over the sigstream kernel.

Exposes the embed -> signature -> featurize chain the way signature
libraries are typically consumed from ML scripts: plain numeric arrays and
plain string labels, no domain objects to construct.  Every computation
happens in the underlying kernel; this layer only adapts shapes and names.
Inputs are viewed zero-copy when the array layout already matches and copied
otherwise; kernels hold no shared state, so calls are reentrant.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from sigstream import __version__ as _kernel_version
from sigstream.core import format_multi_index, multi_indices
from sigstream.core import signature as _signature
from sigstream.embeddings import EmbeddingConfig, StreamRecord
from sigstream.embeddings import lead_lag as _lead_lag
from sigstream.pipeline import featurize as _featurize

__all__ = ["signature", "lead_lag", "featurize", "__version__"]

__version__ = _kernel_version


def signature(points, depth: int) -> tuple[np.ndarray, list[str]]:
    """Truncated signature coefficients of a piecewise-linear path.

    ``points`` is a (n_points, dimension) array-like.  Returns the flat
    coefficient vector in graded-lexicographic order (constant term omitted)
    together with matching labels like ``"(2,1)"``.
    """
    sig = _signature(np.asarray(points, dtype=float), depth)
    labels = [format_multi_index(ix) for ix in multi_indices(sig.dimension, sig.depth)]
    return sig.coefficients[1:], labels


def lead_lag(values) -> np.ndarray:
    """Lead-lag path of a scalar stream as a (2n-1, 2) array: lead first."""
    return _lead_lag(np.asarray(values, dtype=float)).points


def featurize(records: Sequence[dict], config: Optional[dict] = None) -> tuple[np.ndarray, list[str]]:
    """Signature feature matrix for a batch of streams.

    Each record is a mapping with ``values`` and optional ``missing``,
    ``times`` and ``label`` entries.  ``config`` keys (all optional):
    ``depth`` (default 2), ``embedding`` (default ``"delay-pipeline"``),
    ``axis_steps``, ``time_augment``, ``integer_time`` and ``standardize``
    (default True).  Returns (matrix, column labels).
    """
    config = dict(config or {})
    depth = int(config.pop("depth", 2))
    scale = bool(config.pop("standardize", True))
    kind = config.pop("embedding", "delay-pipeline")
    embedding = EmbeddingConfig(kind=kind, **config)

    stream_records = []
    for pos, rec in enumerate(records):
        values = np.asarray(rec["values"], dtype=float)
        missing = np.asarray(
            rec.get("missing", np.zeros(values.shape[0], dtype=bool)), dtype=bool
        )
        stream_records.append(
            StreamRecord(
                values=values,
                missing=missing,
                times=rec.get("times"),
                label=rec.get("label"),
                subject=rec.get("subject", str(pos)),
            )
        )
    matrix = _featurize(stream_records, depth, embedding, scale=scale)
    return matrix.rows, [format_multi_index(c) for c in matrix.columns]
