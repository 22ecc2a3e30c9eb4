"""Truncated signatures of piecewise-linear paths.

The signature of a d-dimensional path is the graded sequence of its
coordinate iterated integrals, indexed by multi-indices over {1..d}.  For a
piecewise-linear path it can be computed exactly: each linear segment with
increment ``delta`` contributes the truncated tensor exponential of ``delta``
(level k holds ``delta^{tensor k} / k!``), and segments are combined with the
truncated tensor (Chen) product.

Coefficients are stored flat in graded-lexicographic multi-index order with
the constant level-0 term (always 1) at position 0, so the tensor product is
a plain per-level outer product over contiguous blocks.

A brute-force integrator, :func:`signature_oracle`, evaluates a single
iterated integral by propagating exact per-segment polynomial antiderivatives
and shares no code with the tensor route; it exists to cross-check it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MAX_DEPTH",
    "InvalidPathError",
    "IncompatibleSignaturesError",
    "InvalidAxesError",
    "Path",
    "MultiIndex",
    "TruncatedSignature",
    "ShuffleExpansion",
    "signature",
    "chen_product",
    "shuffle",
    "signed_area",
    "signature_oracle",
    "term_count",
    "multi_indices",
    "format_multi_index",
]

#: Hard cap on the truncation depth; term counts grow like d**L.
MAX_DEPTH = 10

#: A multi-index is a tuple of coordinate labels, each in 1..d.
MultiIndex = tuple[int, ...]


class InvalidPathError(ValueError):
    """Raised for paths that violate the basic invariants."""


class IncompatibleSignaturesError(ValueError):
    """Raised when combining signatures of different dimension or depth."""


class InvalidAxesError(ValueError):
    """Raised for bad coordinate axes in signed-area queries."""


@dataclass(frozen=True)
class Path:
    """A piecewise-linear path: ordered points in d-dimensional space.

    The parametrization is the point order; by reparametrization invariance
    of the signature no explicit time interval is needed.
    """

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise InvalidPathError(f"path points must be a 2-d array, got ndim={pts.ndim}")
        if pts.shape[1] < 1:
            raise InvalidPathError("path dimension must be at least 1, got dimension 0")
        if pts.shape[0] < 2:
            raise InvalidPathError(f"path needs at least 2 points, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise InvalidPathError("path coordinates must all be finite")
        object.__setattr__(self, "points", pts)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def reversed(self) -> "Path":
        return Path(self.points[::-1])

    def concat(self, other: "Path") -> "Path":
        """Concatenation; ``other`` is translated to start at this endpoint."""
        if other.dimension != self.dimension:
            raise InvalidPathError("cannot concatenate paths of different dimension")
        shifted = other.points - other.points[0] + self.points[-1]
        return Path(np.vstack([self.points, shifted[1:]]))


def term_count(dimension: int, depth: int) -> int:
    """Number of non-constant signature coefficients: d + d**2 + ... + d**L."""
    if dimension < 1:
        raise InvalidPathError(f"dimension must be >= 1, got {dimension}")
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if dimension == 1:
        return depth
    return (dimension ** (depth + 1) - dimension) // (dimension - 1)


def multi_indices(dimension: int, depth: int):
    """Yield all multi-indices of length 1..depth in graded-lexicographic order."""
    for level in range(1, depth + 1):
        yield from itertools.product(range(1, dimension + 1), repeat=level)


def format_multi_index(index: MultiIndex) -> str:
    return "(" + ",".join(str(i) for i in index) + ")"


def _level_offsets(dimension: int, depth: int) -> list[int]:
    """Start position of each level in the flat array; entry 0 is the constant."""
    offsets = [0]
    for level in range(depth + 1):
        offsets.append(offsets[-1] + dimension**level)
    return offsets


@dataclass(frozen=True)
class TruncatedSignature:
    """Signature coefficients up to a truncation depth.

    ``coefficients`` is flat in graded-lexicographic order: the constant term
    1 first, then the d level-1 terms, the d**2 level-2 terms, and so on.
    """

    dimension: int
    depth: int
    coefficients: np.ndarray
    _offsets: list[int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coefficients, dtype=float)
        expected = 1 + term_count(self.dimension, self.depth)
        if coeffs.shape != (expected,):
            raise ValueError(
                f"coefficient array has length {coeffs.shape}, expected ({expected},) "
                f"for dimension {self.dimension}, depth {self.depth}"
            )
        if coeffs[0] != 1.0:
            raise ValueError(f"constant term must be exactly 1, got {coeffs[0]!r}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("signature coefficients must all be finite")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "_offsets", _level_offsets(self.dimension, self.depth))

    @classmethod
    def identity(cls, dimension: int, depth: int) -> "TruncatedSignature":
        """Neutral element of the tensor product: constant 1, all else 0."""
        coeffs = np.zeros(1 + term_count(dimension, depth))
        coeffs[0] = 1.0
        return cls(dimension, depth, coeffs)

    def level(self, k: int) -> np.ndarray:
        """View of the level-k coefficient block (k=0 is the constant)."""
        if not 0 <= k <= self.depth:
            raise ValueError(f"level must be in 0..{self.depth}, got {k}")
        return self.coefficients[self._offsets[k] : self._offsets[k + 1]]

    def get(self, index: MultiIndex) -> float:
        """Coefficient addressed by a multi-index of length 1..depth."""
        k = len(index)
        if not 1 <= k <= self.depth:
            raise ValueError(f"multi-index length must be in 1..{self.depth}, got {k}")
        pos = 0
        for i in index:
            if not 1 <= i <= self.dimension:
                raise ValueError(f"index entry {i} outside 1..{self.dimension}")
            pos = pos * self.dimension + (i - 1)
        return float(self.coefficients[self._offsets[k] + pos])

    def items(self):
        """Yield (multi_index, coefficient) pairs in graded-lex order."""
        flat = iter(self.coefficients[1:])
        for index in multi_indices(self.dimension, self.depth):
            yield index, float(next(flat))

    def scale_covariant(self, lam: float) -> "TruncatedSignature":
        """Signature of the path with all coordinates scaled by ``lam``."""
        coeffs = self.coefficients.copy()
        for k in range(1, self.depth + 1):
            coeffs[self._offsets[k] : self._offsets[k + 1]] *= lam**k
        return TruncatedSignature(self.dimension, self.depth, coeffs)


def _validate_depth(depth: int) -> None:
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if depth > MAX_DEPTH:
        raise ValueError(f"depth {depth} exceeds the hard cap of {MAX_DEPTH}")


def _as_points(path) -> np.ndarray:
    if isinstance(path, Path):
        return path.points
    return Path(np.asarray(path, dtype=float)).points


def _segment_exponential(delta: np.ndarray, depth: int) -> list[np.ndarray]:
    """Per-level blocks of exp(delta): level k is delta^{tensor k} / k!."""
    levels = [np.ones(1)]
    for k in range(1, depth + 1):
        levels.append(np.multiply.outer(levels[-1], delta).ravel() / k)
    return levels


def _tensor_levels_product(a: list[np.ndarray], b: list[np.ndarray], depth: int) -> list[np.ndarray]:
    """Cauchy convolution (a x b)_n = sum_k a_k x b_{n-k}, truncated at depth."""
    out = [np.ones(1)]
    for n in range(1, depth + 1):
        acc = a[n] + b[n]
        for k in range(1, n):
            acc = acc + np.multiply.outer(a[k], b[n - k]).ravel()
        out.append(acc)
    return out


def _levels_to_signature(dimension: int, depth: int, levels: list[np.ndarray]) -> TruncatedSignature:
    return TruncatedSignature(dimension, depth, np.concatenate(levels))


def signature(path, depth: int) -> TruncatedSignature:
    """Truncated signature of a piecewise-linear path.

    Folds per-segment tensor exponentials with the truncated tensor product,
    which is exact for linear segments.
    """
    pts = _as_points(path)
    _validate_depth(depth)
    d = pts.shape[1]
    levels = [np.ones(1)] + [np.zeros(d**k) for k in range(1, depth + 1)]
    for delta in np.diff(pts, axis=0):
        levels = _tensor_levels_product(levels, _segment_exponential(delta, depth), depth)
    return _levels_to_signature(d, depth, levels)


def chen_product(a: TruncatedSignature, b: TruncatedSignature) -> TruncatedSignature:
    """Truncated tensor product; equals the signature of the concatenation."""
    if a.dimension != b.dimension or a.depth != b.depth:
        raise IncompatibleSignaturesError(
            f"cannot combine signatures with dimension/depth "
            f"({a.dimension},{a.depth}) and ({b.dimension},{b.depth})"
        )
    levels = _tensor_levels_product(
        [a.level(k) for k in range(a.depth + 1)],
        [b.level(k) for k in range(b.depth + 1)],
        a.depth,
    )
    return _levels_to_signature(a.dimension, a.depth, levels)


def shuffle(i: MultiIndex, j: MultiIndex) -> "ShuffleExpansion":
    """All order-preserving interleavings of two multi-indices.

    The product of two signature coefficients expands as the sum of the
    coefficients addressed by these interleavings, with multiplicities.
    """
    i = tuple(int(x) for x in i)
    j = tuple(int(x) for x in j)
    for idx in (i, j):
        if len(idx) < 1:
            raise ValueError("multi-indices must have length >= 1")
        if any(x < 1 for x in idx):
            raise ValueError(f"multi-index entries must be >= 1, got {idx}")

    def interleave(left: MultiIndex, right: MultiIndex) -> dict[MultiIndex, int]:
        if not left:
            return {right: 1}
        if not right:
            return {left: 1}
        merged: dict[MultiIndex, int] = {}
        for prefix, mult in interleave(left[:-1], right).items():
            key = prefix + (left[-1],)
            merged[key] = merged.get(key, 0) + mult
        for prefix, mult in interleave(left, right[:-1]).items():
            key = prefix + (right[-1],)
            merged[key] = merged.get(key, 0) + mult
        return merged

    terms = sorted(interleave(i, j).items())
    return ShuffleExpansion(terms=terms)


@dataclass(frozen=True)
class ShuffleExpansion:
    """Expansion of a coefficient product into higher-order coefficients."""

    terms: list[tuple[MultiIndex, int]]

    @property
    def total_multiplicity(self) -> int:
        return sum(mult for _, mult in self.terms)

    def evaluate(self, sig: TruncatedSignature) -> float:
        """Sum of multiplicity-weighted coefficients under ``sig``."""
        return sum(mult * sig.get(index) for index, mult in self.terms)


def signed_area(sig: TruncatedSignature, i: int, j: int) -> float:
    """Area between the (i, j) projection of the path and its chord."""
    if sig.depth < 2:
        raise InvalidAxesError(f"signed area needs depth >= 2, got {sig.depth}")
    if i == j:
        raise InvalidAxesError(f"axes must differ, got i=j={i}")
    for axis in (i, j):
        if not 1 <= axis <= sig.dimension:
            raise InvalidAxesError(f"axis {axis} outside 1..{sig.dimension}")
    return 0.5 * (sig.get((i, j)) - sig.get((j, i)))


def _poly_antiderivative(coeffs: list[float]) -> list[float]:
    """Antiderivative with zero constant term; coefficients in ascending power."""
    return [0.0] + [c / (power + 1) for power, c in enumerate(coeffs)]


def _poly_eval(coeffs: list[float], u: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * u + c
    return acc


def signature_oracle(path, index: MultiIndex) -> float:
    """One iterated integral, by direct recursive integration.

    Evaluates S^(i1..ik) via S^(i1..im)(t) = integral of S^(i1..i(m-1)) dX^(im),
    carrying the integrand across segments as exact polynomials in the local
    segment parameter.  Deliberately independent of the tensor-product route.
    """
    pts = _as_points(path)
    d = pts.shape[1]
    index = tuple(int(x) for x in index)
    if len(index) < 1:
        raise ValueError("multi-index must have length >= 1")
    for axis in index:
        if not 1 <= axis <= d:
            raise ValueError(f"index entry {axis} outside 1..{d}")

    deltas = np.diff(pts, axis=0)
    n_segments = deltas.shape[0]
    # Level-0 integrand is the constant 1 on every segment.
    polys: list[list[float]] = [[1.0] for _ in range(n_segments)]
    value = 0.0
    for axis in index:
        carried = 0.0
        next_polys: list[list[float]] = []
        for seg in range(n_segments):
            slope = float(deltas[seg, axis - 1])
            integrated = _poly_antiderivative(polys[seg])
            poly = [slope * c for c in integrated]
            poly[0] += carried
            carried = _poly_eval(poly, 1.0)
            next_polys.append(poly)
        polys = next_polys
        value = carried
    return value
