"""Embeddings of discrete data streams into piecewise-linear paths.

A scalar stream becomes a path in 2 or 3 dimensions before its signature is
taken: stairstep (axis) and straight-line interpolations of (t, x) pairs, the
lead-lag transform pairing a stream with a delayed copy of itself, a
missing-data lift that adds an indicator coordinate, and the composite
delay-stream construction (integer time + lead + lag) used by the pipeline.

Conventions, fixed here once:

- Axis paths move along the time axis first, then the value axis.
- Lead-lag: the lead coordinate changes first.  For input (x0..xN) the path
  has 2N+1 points with point 2n = (x_n, x_n) and point 2n+1 = (x_{n+1}, x_n).
- Missing values are feed-forward filled (last observed value carried
  forward); a stream may not begin with a missing value, since there is
  nothing to carry.
- Integer time starts at 0 for the missing-data lift and at 1 for the delay
  construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import Path

__all__ = [
    "InvalidStreamError",
    "StreamRecord",
    "EmbeddingConfig",
    "EMBEDDING_KINDS",
    "axis_path",
    "linear_path",
    "lead_lag",
    "missing_lift",
    "delay_path",
    "feed_forward_fill",
    "embed_record",
]


class InvalidStreamError(ValueError):
    """Raised for streams that cannot be embedded."""


@dataclass(frozen=True)
class StreamRecord:
    """One subject's raw stream: values, missing mask, optional times, label."""

    values: np.ndarray
    missing: np.ndarray
    times: Optional[np.ndarray] = None
    label: Optional[int] = None
    subject: Optional[str] = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        missing = np.asarray(self.missing, dtype=bool)
        if values.ndim != 1 or missing.ndim != 1:
            raise InvalidStreamError("values and missing mask must be 1-d")
        if values.shape != missing.shape:
            raise InvalidStreamError(
                f"values ({values.shape[0]}) and missing mask ({missing.shape[0]}) "
                "must have equal length"
            )
        if not np.all(np.isfinite(values[~missing])):
            raise InvalidStreamError("observed values must be finite")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "missing", missing)
        if self.times is not None:
            times = np.asarray(self.times, dtype=float)
            if times.shape != values.shape:
                raise InvalidStreamError("times must match values in length")
            if not np.all(np.diff(times) > 0):
                raise InvalidStreamError("times must be strictly increasing")
            object.__setattr__(self, "times", times)

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def observed_count(self) -> int:
        return int(np.count_nonzero(~self.missing))

    def max_consecutive_missing(self) -> int:
        run = longest = 0
        for flag in self.missing:
            run = run + 1 if flag else 0
            longest = max(longest, run)
        return longest


EMBEDDING_KINDS = ("axis", "linear", "lead-lag", "missing-lift", "delay-pipeline")


@dataclass(frozen=True)
class EmbeddingConfig:
    """Which path construction to apply to a stream record.

    ``time_augment`` prepends a lead-expanded time coordinate to the
    lead-lag transform; the delay pipeline is exactly lead-lag with integer
    time, so that combination is forced.  ``integer_time`` replaces supplied
    observation times with an integer clock.  ``axis_steps`` switches the
    delay pipeline to fully axis-wise moves (time, then lead, then lag).
    """

    kind: str = "delay-pipeline"
    time_augment: bool = False
    integer_time: bool = False
    axis_steps: bool = False

    def __post_init__(self) -> None:
        if self.kind not in EMBEDDING_KINDS:
            raise InvalidStreamError(
                f"unknown embedding kind {self.kind!r}; expected one of {EMBEDDING_KINDS}"
            )
        if self.kind == "delay-pipeline":
            object.__setattr__(self, "time_augment", True)
            object.__setattr__(self, "integer_time", True)

    @property
    def dimension(self) -> int:
        """Dimension of the embedded path."""
        if self.kind in ("axis", "linear"):
            return 2
        if self.kind == "lead-lag":
            return 3 if self.time_augment else 2
        return 3


def _check_pairs(pairs) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidStreamError("expected a sequence of (t, x) pairs")
    if arr.shape[0] < 2:
        raise InvalidStreamError(f"need at least 2 pairs, got {arr.shape[0]}")
    t, x = arr[:, 0], arr[:, 1]
    if not np.all(np.diff(t) > 0):
        raise InvalidStreamError("times must be strictly increasing")
    return t, x


def axis_path(pairs) -> Path:
    """Stairstep embedding of (t, x) pairs: move in time first, then in value.

    Produces 2n-1 points for n input pairs; between consecutive inputs
    (t1, x1) and (t2, x2) the intermediate corner is (t2, x1).
    """
    t, x = _check_pairs(pairs)
    n = t.shape[0]
    points = np.empty((2 * n - 1, 2))
    points[0::2, 0] = t
    points[0::2, 1] = x
    points[1::2, 0] = t[1:]
    points[1::2, 1] = x[:-1]
    return Path(points)


def linear_path(pairs) -> Path:
    """Straight-line interpolation: the (t, x) pairs become the path vertices."""
    t, x = _check_pairs(pairs)
    return Path(np.column_stack([t, x]))


def lead_lag(values) -> Path:
    """Lead-lag transform of a scalar stream, as a 2-d path.

    Coordinate 1 (lead) advances to the next stream value one step before
    coordinate 2 (lag) catches up, so the path exposes the squared increments
    of the stream as signed area.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.shape[0] < 2:
        raise InvalidStreamError("lead-lag needs a 1-d stream of at least 2 values")
    if not np.all(np.isfinite(x)):
        raise InvalidStreamError("stream values must be finite")
    n = x.shape[0]
    points = np.empty((2 * n - 1, 2))
    points[0::2, 0] = x
    points[0::2, 1] = x
    points[1::2, 0] = x[1:]
    points[1::2, 1] = x[:-1]
    return Path(points)


def feed_forward_fill(values, missing) -> np.ndarray:
    """Replace missing entries with the last observed value."""
    x = np.asarray(values, dtype=float).copy()
    mask = np.asarray(missing, dtype=bool)
    if mask.all():
        raise InvalidStreamError("stream has no observed values")
    if mask[0]:
        raise InvalidStreamError(
            "stream begins with a missing value; nothing to carry forward"
        )
    last = x[0]
    for idx in range(x.shape[0]):
        if mask[idx]:
            x[idx] = last
        else:
            last = x[idx]
    return x


def missing_lift(record: StreamRecord) -> Path:
    """Lift a stream with gaps into 3-d: (time, carried value, missing flag).

    Missing observations keep the last observed value (feed forward) and set
    the indicator coordinate to 1, so the gap structure itself becomes part
    of the path instead of being imputed away.  Time is the supplied time
    axis, or 0..N-1 when none is given.
    """
    filled = feed_forward_fill(record.values, record.missing)
    n = len(record)
    if n < 2:
        raise InvalidStreamError(f"need at least 2 entries, got {n}")
    t = record.times if record.times is not None else np.arange(n, dtype=float)
    indicator = record.missing.astype(float)
    return Path(np.column_stack([t, filled, indicator]))


def _lead_expand(values: np.ndarray) -> np.ndarray:
    """First coordinate of the lead-lag transform, on its 2N+1 point grid."""
    out = np.empty(2 * values.shape[0] - 1)
    out[0::2] = values
    out[1::2] = values[1:]
    return out


def _lag_expand(values: np.ndarray) -> np.ndarray:
    out = np.empty(2 * values.shape[0] - 1)
    out[0::2] = values
    out[1::2] = values[:-1]
    return out


def delay_path(delays, axis_steps: bool = False) -> Path:
    """3-d path from a response-delay stream: (integer time, lead, lag).

    The delay stream is lead-lag transformed and an integer clock t = 1..N is
    carried along on the lead schedule, so time advances when the lead does.
    With ``axis_steps`` every move is along a single axis instead (time, then
    lead, then lag), giving the stairstep variant with 3N-2 points.
    """
    x = np.asarray(delays, dtype=float)
    if x.ndim != 1 or x.shape[0] < 2:
        raise InvalidStreamError("need at least 2 delays")
    if not np.all(np.isfinite(x)):
        raise InvalidStreamError("delays must be finite")
    if np.any(x < 0):
        raise InvalidStreamError("delays must be non-negative")
    n = x.shape[0]
    t = np.arange(1, n + 1, dtype=float)
    if not axis_steps:
        points = np.column_stack([_lead_expand(t), _lead_expand(x), _lag_expand(x)])
        return Path(points)
    points = np.empty((3 * n - 2, 3))
    points[0] = (t[0], x[0], x[0])
    for i in range(n - 1):
        base = 1 + 3 * i
        points[base] = (t[i + 1], x[i], x[i])
        points[base + 1] = (t[i + 1], x[i + 1], x[i])
        points[base + 2] = (t[i + 1], x[i + 1], x[i + 1])
    return Path(points)


def embed_record(record: StreamRecord, config: EmbeddingConfig) -> Path:
    """Embed one stream record according to the configured construction.

    Embeddings without an explicit missing-data mechanism see the feed-forward
    filled stream; only the missing-lift keeps the gap structure.
    """
    if config.kind == "missing-lift":
        return missing_lift(record)

    filled = feed_forward_fill(record.values, record.missing)
    n = filled.shape[0]
    if config.kind == "delay-pipeline":
        return delay_path(filled, axis_steps=config.axis_steps)

    if config.kind == "lead-lag":
        base = lead_lag(filled)
        if not config.time_augment:
            return base
        t = _integer_or_supplied_times(record, config, start=1)
        return Path(np.column_stack([_lead_expand(t), base.points]))

    t = _integer_or_supplied_times(record, config, start=0)
    pairs = np.column_stack([t, filled])
    return axis_path(pairs) if config.kind == "axis" else linear_path(pairs)


def _integer_or_supplied_times(
    record: StreamRecord, config: EmbeddingConfig, start: int
) -> np.ndarray:
    n = len(record)
    if config.integer_time or record.times is None:
        return np.arange(start, start + n, dtype=float)
    return record.times
