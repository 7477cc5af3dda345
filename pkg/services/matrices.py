"""
Matrices Module - Skew-symmetric and rotation matrix values.

Both types carry floating entries and, optionally, an exact mirror: a numpy
object array of QuadSurd entries from a single quadratic field. Operations
keep the mirror whenever the arithmetic stays inside one field and drop it
otherwise.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np

from services.errors import DimensionError, DomainError
from services.exact_scalar import QuadSurd, Scalar

SKEW_TOL = 1e-12
ORTHOGONALITY_TOL = 1e-10


def index_pairs(n: int) -> List[Tuple[int, int]]:
    """Index pairs (k, l), k < l, in the order used for coordinates."""
    return list(combinations(range(n), 2))


def algebra_dimension(n: int) -> int:
    return n * (n - 1) // 2


def exact_array(rows: Sequence[Sequence[Scalar]]) -> np.ndarray:
    """Object array of QuadSurd entries."""
    array = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, row in enumerate(rows):
        for j, value in enumerate(row):
            array[i, j] = QuadSurd.coerce(value)
    return array


def exact_identity(n: int) -> np.ndarray:
    return exact_array([[1 if i == j else 0 for j in range(n)] for i in range(n)])


def exact_product(left: np.ndarray, right: np.ndarray) -> Optional[np.ndarray]:
    """Exact matrix product, or None when the entries live in different fields."""
    try:
        return left.dot(right)
    except DomainError:
        return None


def exact_determinant(matrix: np.ndarray) -> QuadSurd:
    """Determinant by Gaussian elimination over the entries' field."""
    work = [list(row) for row in matrix]
    size = len(work)
    determinant = QuadSurd(1)
    for col in range(size):
        pivot = next((r for r in range(col, size) if work[r][col]), None)
        if pivot is None:
            return QuadSurd(0)
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            determinant = -determinant
        determinant = determinant * work[col][col]
        for r in range(col + 1, size):
            if work[r][col]:
                factor = work[r][col] / work[col][col]
                work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
    return determinant


def _square_entries(entries, name: str) -> np.ndarray:
    array = np.array(entries, dtype=float)
    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 2:
        raise DimensionError(f"{name} must be a square matrix of size at least 2, got shape {array.shape}")
    return array


def _checked_exact(exact, shape) -> Optional[np.ndarray]:
    if exact is None:
        return None
    array = exact if isinstance(exact, np.ndarray) and exact.dtype == object else exact_array(exact)
    if array.shape != shape:
        raise DimensionError(f"exact mirror has shape {array.shape}, expected {shape}")
    return array


@dataclass(frozen=True, eq=False)
class SkewMatrix:
    """An element of so(N)."""

    entries: np.ndarray
    exact: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        exact = None
        if self.exact is not None:
            exact = _checked_exact(self.exact, np.shape(self.exact))
            entries = _square_entries(exact.astype(float), "skew matrix")
            n = entries.shape[0]
            if any(exact[i, j] != -exact[j, i] for i in range(n) for j in range(n)):
                raise DomainError("exact entries are not skew-symmetric")
        else:
            entries = _square_entries(self.entries, "skew matrix")
            if not np.allclose(entries, -entries.T, rtol=0.0, atol=SKEW_TOL):
                raise DomainError("matrix is not skew-symmetric")
            entries = (entries - entries.T) / 2
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "exact", exact)

    @classmethod
    def from_exact(cls, rows: Sequence[Sequence[Scalar]]) -> SkewMatrix:
        return cls(entries=None, exact=exact_array(rows))

    @classmethod
    def from_coordinates(cls, n: int, coordinates: Sequence) -> SkewMatrix:
        """Build from coefficients over the basis E_kl, k < l."""
        pairs = index_pairs(n)
        if len(coordinates) != len(pairs):
            raise DimensionError(f"so({n}) needs {len(pairs)} coordinates, got {len(coordinates)}")
        if all(isinstance(c, (int, Fraction, QuadSurd)) for c in coordinates):
            rows = [[QuadSurd(0)] * n for _ in range(n)]
            for (k, l), value in zip(pairs, coordinates):
                rows[k][l] = QuadSurd.coerce(value)
                rows[l][k] = -QuadSurd.coerce(value)
            return cls.from_exact(rows)
        entries = np.zeros((n, n))
        for (k, l), value in zip(pairs, coordinates):
            entries[k, l] = value
            entries[l, k] = -value
        return cls(entries)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def coordinates(self) -> np.ndarray:
        rows, cols = np.triu_indices(self.dimension, k=1)
        return self.entries[rows, cols]

    def exact_coordinates(self) -> Optional[List[QuadSurd]]:
        if self.exact is None:
            return None
        return [self.exact[k, l] for k, l in index_pairs(self.dimension)]

    def norm(self) -> float:
        """||X|| with ||X||^2 = tr(X^T X)/2."""
        return float(np.sqrt(0.5 * np.sum(self.entries * self.entries)))

    def inner(self, other: SkewMatrix) -> float:
        return float(0.5 * np.sum(self.entries * other.entries))

    def exact_inner(self, other: SkewMatrix) -> Optional[QuadSurd]:
        mine, theirs = self.exact_coordinates(), other.exact_coordinates()
        if mine is None or theirs is None:
            return None
        try:
            return sum((x * y for x, y in zip(mine, theirs)), QuadSurd(0))
        except DomainError:
            return None

    def _exact_combination(self, other: SkewMatrix, sign: int) -> Optional[np.ndarray]:
        if self.exact is None or other.exact is None:
            return None
        try:
            return self.exact + other.exact if sign > 0 else self.exact - other.exact
        except DomainError:
            return None

    def __add__(self, other: SkewMatrix) -> SkewMatrix:
        exact = self._exact_combination(other, 1)
        return SkewMatrix(None, exact) if exact is not None else SkewMatrix(self.entries + other.entries)

    def __sub__(self, other: SkewMatrix) -> SkewMatrix:
        exact = self._exact_combination(other, -1)
        return SkewMatrix(None, exact) if exact is not None else SkewMatrix(self.entries - other.entries)

    def __neg__(self) -> SkewMatrix:
        if self.exact is not None:
            return SkewMatrix(None, -self.exact)
        return SkewMatrix(-self.entries)

    def scaled(self, factor) -> SkewMatrix:
        """Multiply by a scalar; exact factors keep the exact mirror."""
        if self.exact is not None and isinstance(factor, (int, Fraction, QuadSurd)):
            try:
                return SkewMatrix(None, self.exact * QuadSurd.coerce(factor))
            except DomainError:
                pass
        return SkewMatrix(self.entries * float(factor))

    def drop_exact(self) -> SkewMatrix:
        return SkewMatrix(self.entries)


@dataclass(frozen=True, eq=False)
class RotationMatrix:
    """An element of SO(N)."""

    entries: np.ndarray
    exact: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        exact = None
        if self.exact is not None:
            exact = _checked_exact(self.exact, np.shape(self.exact))
            entries = _square_entries(exact.astype(float), "rotation")
            n = entries.shape[0]
            gram = exact_product(exact.T, exact)
            if gram is None or not np.array_equal(gram, exact_identity(n)):
                raise DomainError("exact entries are not orthogonal")
            if exact_determinant(exact) != 1:
                raise DomainError("determinant must equal one")
        else:
            entries = _square_entries(self.entries, "rotation")
            n = entries.shape[0]
            if np.max(np.abs(entries.T @ entries - np.eye(n))) >= ORTHOGONALITY_TOL:
                raise DomainError("matrix is not orthogonal")
            if abs(np.linalg.det(entries) - 1.0) >= ORTHOGONALITY_TOL:
                raise DomainError("determinant must equal one")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "exact", exact)

    @classmethod
    def from_exact(cls, rows: Sequence[Sequence[Scalar]]) -> RotationMatrix:
        return cls(entries=None, exact=exact_array(rows))

    @classmethod
    def identity(cls, n: int) -> RotationMatrix:
        return cls(entries=None, exact=exact_identity(n))

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def inverse(self) -> RotationMatrix:
        if self.exact is not None:
            return RotationMatrix(None, self.exact.T.copy())
        return RotationMatrix(self.entries.T.copy())

    def __matmul__(self, other: RotationMatrix) -> RotationMatrix:
        if self.dimension != other.dimension:
            raise DimensionError(f"cannot multiply SO({self.dimension}) by SO({other.dimension})")
        if self.exact is not None and other.exact is not None:
            exact = exact_product(self.exact, other.exact)
            if exact is not None:
                return RotationMatrix(None, exact)
        return RotationMatrix(self.entries @ other.entries)

    def power(self, exponent: int) -> RotationMatrix:
        base = self if exponent >= 0 else self.inverse()
        result = RotationMatrix.identity(self.dimension)
        for _ in range(abs(exponent)):
            result = result @ base
        return result

    def is_identity(self, tol: float = ORTHOGONALITY_TOL) -> bool:
        if self.exact is not None:
            return bool(np.array_equal(self.exact, exact_identity(self.dimension)))
        return bool(np.max(np.abs(self.entries - np.eye(self.dimension))) < tol)

    def drop_exact(self) -> RotationMatrix:
        return RotationMatrix(self.entries)


def basis_element(n: int, k: int, l: int) -> SkewMatrix:
    """E_kl = |k><l| - |l><k| in so(n), zero-based indices."""
    if not (0 <= k < n and 0 <= l < n) or k == l:
        raise DimensionError(f"invalid mode pair ({k}, {l}) for {n} modes")
    rows = [[0] * n for _ in range(n)]
    rows[k][l] = 1
    rows[l][k] = -1
    return SkewMatrix.from_exact(rows)


def standard_basis(n: int) -> List[SkewMatrix]:
    return [basis_element(n, k, l) for k, l in index_pairs(n)]


def planar_rotation(n: int, k: int, l: int, theta: float,
                    cos_exact: Optional[QuadSurd] = None,
                    sin_exact: Optional[QuadSurd] = None) -> RotationMatrix:
    """
    O_kl(theta) = cos(theta)(|k><k| + |l><l|) + sin(theta)(|k><l| - |l><k|).

    The exact mirror is attached when both cos and sin are given and share
    a quadratic field.
    """
    if not (0 <= k < n and 0 <= l < n) or k == l:
        raise DimensionError(f"invalid mode pair ({k}, {l}) for {n} modes")
    if cos_exact is not None and sin_exact is not None:
        rows = [[QuadSurd(1 if i == j else 0) for j in range(n)] for i in range(n)]
        rows[k][k] = rows[l][l] = cos_exact
        rows[k][l] = sin_exact
        rows[l][k] = -sin_exact
        try:
            return RotationMatrix.from_exact(rows)
        except DomainError:
            pass
    entries = np.eye(n)
    entries[k, k] = entries[l, l] = math.cos(theta)
    entries[k, l] = math.sin(theta)
    entries[l, k] = -math.sin(theta)
    return RotationMatrix(entries)


def rotation_distance(left: np.ndarray, right: np.ndarray) -> float:
    """Bi-invariant distance arccos((tr(L R^T) - N + 2)/2); the rotation angle for N = 3."""
    n = left.shape[0]
    value = (np.sum(left * right) - n + 2) / 2
    return float(np.arccos(np.clip(value, -1.0, 1.0)))
