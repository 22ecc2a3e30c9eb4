"""Deterministic JSON rendering.

Floats are written with 17 significant digits (enough to round-trip IEEE
doubles exactly), NaN becomes null, and key order is the insertion order of
the dicts being serialized, so equal inputs always produce equal bytes.
"""

from __future__ import annotations

import math
from typing import Any

__all__ = ["dumps", "format_float"]


def format_float(value: float) -> str:
    if math.isnan(value):
        return "null"
    if math.isinf(value):
        raise ValueError("cannot serialize infinite values")
    if value == int(value) and abs(value) < 1e16:
        return f"{value:.1f}"
    return format(value, ".17g")


def _escape(text: str) -> str:
    out = ['"']
    for ch in text:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _render(value: Any, indent: int, pad: str) -> str:
    prefix = pad * (indent + 1)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, str):
        return _escape(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{prefix}{_escape(str(key))}: {_render(val, indent + 1, pad)}"
            for key, val in value.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad * indent + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{prefix}{_render(val, indent + 1, pad)}" for val in value]
        return "[\n" + ",\n".join(items) + "\n" + pad * indent + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(value: Any, indent: int = 2) -> str:
    """Serialize to a JSON string with stable byte-level formatting."""
    return _render(value, 0, " " * indent) + "\n"
