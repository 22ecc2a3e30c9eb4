"""Reading and writing stream datasets and feature tables.

Dataset CSV schema (version 1):

    subject,week,delay,missing,label

One row per subject-week.  A missing observation has an empty ``delay``
field and ``missing=1``; the label must be constant within a subject.  Rows
of one subject must appear with strictly increasing weeks.

``sig`` additionally accepts a bare stream: comma-, whitespace- or
newline-separated values where ``*`` (or an empty field) marks a missing
observation, e.g. ``1,3,*,5``.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path as FsPath
from typing import Sequence

import numpy as np

from .embeddings import StreamRecord
from .ml import FeatureMatrix
from .core import format_multi_index

__all__ = [
    "DataFormatError",
    "DATASET_HEADER",
    "read_records",
    "write_records",
    "read_stream",
    "write_features",
]

DATASET_HEADER = ["subject", "week", "delay", "missing", "label"]


class DataFormatError(ValueError):
    """Input file does not match the documented schema; message carries
    file and line position."""


def _fail(path: str, line: int, message: str) -> None:
    raise DataFormatError(f"{path}:{line}: {message}")


def _num(text: str) -> str:
    """Shortest decimal that round-trips the float exactly."""
    value = float(text) if isinstance(text, str) else float(text)
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def write_records(records: Sequence[StreamRecord], path) -> None:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(DATASET_HEADER)
    for pos, record in enumerate(records):
        subject = record.subject if record.subject is not None else str(pos)
        times = (
            record.times
            if record.times is not None
            else np.arange(1, len(record) + 1, dtype=float)
        )
        label = record.label if record.label is not None else 0
        for week, value, missing in zip(times, record.values, record.missing):
            writer.writerow(
                [
                    subject,
                    _num(week),
                    "" if missing else _num(value),
                    int(bool(missing)),
                    int(label),
                ]
            )
    FsPath(path).write_text(out.getvalue(), encoding="utf-8")


def _parse_float(path: str, line: int, field: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        _fail(path, line, f"field {field!r}: {text!r} is not a number")


def _parse_binary(path: str, line: int, field: str, text: str) -> int:
    if text not in ("0", "1"):
        _fail(path, line, f"field {field!r}: expected 0 or 1, got {text!r}")
    return int(text)


def read_records(path) -> list[StreamRecord]:
    """Parse a dataset CSV; malformed input raises with file:line context."""
    name = str(path)
    text = FsPath(path).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        _fail(name, 1, "empty file")
    if [h.strip() for h in header] != DATASET_HEADER:
        _fail(name, 1, f"expected header {','.join(DATASET_HEADER)}, got {','.join(header)}")

    order: list[str] = []
    per_subject: dict[str, dict] = {}
    for line, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(DATASET_HEADER):
            _fail(name, line, f"expected {len(DATASET_HEADER)} fields, got {len(row)}")
        subject, week_s, delay_s, missing_s, label_s = (field.strip() for field in row)
        week = _parse_float(name, line, "week", week_s)
        missing = _parse_binary(name, line, "missing", missing_s)
        label = _parse_binary(name, line, "label", label_s)
        if missing:
            delay = 0.0
            if delay_s:
                _fail(name, line, "missing rows must leave the delay field empty")
        else:
            if not delay_s:
                _fail(name, line, "observed rows need a delay value")
            delay = _parse_float(name, line, "delay", delay_s)
            if delay < 0:
                _fail(name, line, f"delays must be >= 0, got {delay}")
        if subject not in per_subject:
            order.append(subject)
            per_subject[subject] = {"weeks": [], "values": [], "missing": [], "label": label}
        entry = per_subject[subject]
        if entry["label"] != label:
            _fail(name, line, f"subject {subject}: label changed from {entry['label']} to {label}")
        if entry["weeks"] and week <= entry["weeks"][-1]:
            _fail(name, line, f"subject {subject}: weeks must be strictly increasing")
        entry["weeks"].append(week)
        entry["values"].append(delay)
        entry["missing"].append(bool(missing))

    if not order:
        _fail(name, 2, "no data rows")
    return [
        StreamRecord(
            values=np.array(per_subject[s]["values"]),
            missing=np.array(per_subject[s]["missing"]),
            times=np.array(per_subject[s]["weeks"]),
            label=per_subject[s]["label"],
            subject=s,
        )
        for s in order
    ]


def read_stream(path) -> StreamRecord:
    """A single stream for ``sig``: either a one-subject dataset CSV or a
    bare value list with ``*``/empty marking gaps."""
    name = str(path)
    text = FsPath(path).read_text(encoding="utf-8")
    first = text.splitlines()[0] if text.splitlines() else ""
    if [h.strip() for h in first.split(",")] == DATASET_HEADER:
        records = read_records(path)
        if len(records) != 1:
            raise DataFormatError(
                f"{name}: expected exactly one subject, found {len(records)}"
            )
        return records[0]

    values: list[float] = []
    missing: list[bool] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        # Comma-separated lines may use empty fields for gaps; whitespace
        # separation needs the explicit * marker.
        tokens = [t.strip() for t in line.split(",")] if "," in line else line.split()
        for token in tokens:
            if token in ("", "*"):
                values.append(0.0)
                missing.append(True)
            else:
                try:
                    values.append(float(token))
                except ValueError:
                    _fail(name, line_no, f"{token!r} is not a number (use * for missing)")
                missing.append(False)
    if len(values) < 2:
        _fail(name, 1, f"need at least 2 stream values, got {len(values)}")
    return StreamRecord(values=np.array(values), missing=np.array(missing))


def write_features(matrix: FeatureMatrix, path) -> None:
    """Feature table CSV: subject, label, then one column per multi-index."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        ["subject", "label"] + [format_multi_index(c) for c in matrix.columns]
    )
    subjects = (
        matrix.subjects
        if matrix.subjects is not None
        else tuple(str(i) for i in range(matrix.n_rows))
    )
    for subject, label, row in zip(subjects, matrix.labels, matrix.rows):
        writer.writerow([subject, int(label)] + [repr(float(v)) for v in row])
    FsPath(path).write_text(out.getvalue(), encoding="utf-8")
