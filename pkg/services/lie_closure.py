"""
Lie Closure Module - Commutator closure of generator sets in so(N), rank
computations, and the closed-form change-of-basis determinants of the
product generating sets.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from services.errors import DimensionError, DomainError
from services.exact_scalar import QuadSurd
from services.matrices import (
    RotationMatrix,
    SkewMatrix,
    algebra_dimension,
    basis_element,
    planar_rotation,
)
from services.so3_kernel import bch_orthogonal

logger = logging.getLogger(__name__)

RANK_TOL = 1e-8
EXACT_CLOSURE_MAX_MODES = 4
STRUCTURE_TOL = 1e-10

# (first pair, second pair) of a product O_first O_second, zero-based modes
ProductLabel = Tuple[Tuple[int, int], Tuple[int, int]]


@dataclass(frozen=True, eq=False)
class LieSpan:
    """Orthonormal basis of a Lie subalgebra of so(N) under <A, B> = tr(A^T B)/2."""

    dimension_n: int
    basis: List[SkewMatrix]
    exact_basis: Optional[List[SkewMatrix]] = None
    rounds: int = 0

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def is_exact(self) -> bool:
        return self.exact_basis is not None

    def residual(self, X: SkewMatrix) -> float:
        """Norm of the component of X orthogonal to the span."""
        v = X.coordinates().copy()
        for b in self.basis:
            v -= np.dot(b.coordinates(), v) * b.coordinates()
        return float(np.linalg.norm(v))

    def contains(self, X: SkewMatrix, tol: float = RANK_TOL) -> bool:
        return self.residual(X) <= tol * max(1.0, X.norm())


def commutator(X: SkewMatrix, Y: SkewMatrix) -> SkewMatrix:
    """[X, Y] = XY - YX."""
    if X.dimension != Y.dimension:
        raise DimensionError(f"cannot bracket so({X.dimension}) with so({Y.dimension})")
    if X.exact is not None and Y.exact is not None:
        try:
            return SkewMatrix(None, X.exact.dot(Y.exact) - Y.exact.dot(X.exact))
        except DomainError:
            pass
    return SkewMatrix(X.entries @ Y.entries - Y.entries @ X.entries)


def _orthogonalize(basis: List[np.ndarray], vector: np.ndarray) -> np.ndarray:
    # modified Gram-Schmidt, applied twice
    v = vector.astype(float)
    for _ in range(2):
        for b in basis:
            v = v - np.dot(b, v) * b
    return v


def _insert(basis: List[np.ndarray], vector: np.ndarray, tol: float) -> bool:
    v = _orthogonalize(basis, vector)
    norm = np.linalg.norm(v)
    if norm > tol:
        basis.append(v / norm)
        return True
    return False


def _check_generators(generators: Sequence[SkewMatrix]) -> int:
    if not generators:
        raise DimensionError("closure needs at least one generator")
    n = generators[0].dimension
    if any(g.dimension != n for g in generators):
        raise DimensionError("generators have mixed sizes")
    return n


def _float_closure(n: int, generators: Sequence[SkewMatrix], rank_tol: float) -> LieSpan:
    vectors: List[np.ndarray] = []
    for g in generators:
        _insert(vectors, g.coordinates(), rank_tol * max(1.0, g.norm()))
    elements = [SkewMatrix.from_coordinates(n, list(map(float, v))) for v in vectors]
    frontier = list(range(len(elements)))
    rounds = 0
    while frontier and len(elements) < algebra_dimension(n):
        rounds += 1
        added: List[int] = []
        for j in frontier:
            for i in range(j):
                bracket = commutator(elements[i], elements[j])
                if _insert(vectors, bracket.coordinates(), rank_tol):
                    elements.append(SkewMatrix.from_coordinates(n, list(map(float, vectors[-1]))))
                    added.append(len(elements) - 1)
        logger.debug("closure round %d in so(%d): dim %d", rounds, n, len(elements))
        frontier = added
    return LieSpan(n, elements, None, rounds)


def _reduce_exact(rows: Dict[int, List[QuadSurd]], vector: List[QuadSurd]) -> List[QuadSurd]:
    v = list(vector)
    for pivot, row in rows.items():
        if v[pivot]:
            factor = v[pivot]
            v = [x - factor * y for x, y in zip(v, row)]
    return v


def _add_exact(rows: Dict[int, List[QuadSurd]], vector: List[QuadSurd]) -> bool:
    v = _reduce_exact(rows, vector)
    pivot = next((i for i, x in enumerate(v) if x), None)
    if pivot is None:
        return False
    lead = v[pivot]
    v = [x / lead for x in v]
    for key, row in list(rows.items()):
        if row[pivot]:
            factor = row[pivot]
            rows[key] = [x - factor * y for x, y in zip(row, v)]
    rows[pivot] = v
    return True


def _exact_closure(n: int, generators: Sequence[SkewMatrix]) -> LieSpan:
    rows: Dict[int, List[QuadSurd]] = {}
    elements: List[SkewMatrix] = []
    for g in generators:
        if _add_exact(rows, g.exact_coordinates()):
            elements.append(g)
    frontier = list(range(len(elements)))
    rounds = 0
    while frontier and len(elements) < algebra_dimension(n):
        rounds += 1
        added: List[int] = []
        for j in frontier:
            for i in range(j):
                bracket = commutator(elements[i], elements[j])
                if bracket.exact is None:
                    raise DomainError("exact bracket left the coefficient field")
                if _add_exact(rows, bracket.exact_coordinates()):
                    elements.append(bracket)
                    added.append(len(elements) - 1)
        logger.debug("exact closure round %d in so(%d): dim %d", rounds, n, len(elements))
        frontier = added
    vectors: List[np.ndarray] = []
    for element in elements:
        _insert(vectors, element.coordinates(), 0.0)
    basis = [SkewMatrix.from_coordinates(n, list(map(float, v))) for v in vectors]
    return LieSpan(n, basis, elements, rounds)


def closure(generators: Sequence[SkewMatrix], rank_tol: float = RANK_TOL,
            exact: Optional[bool] = None) -> LieSpan:
    """
    Smallest Lie subalgebra of so(N) containing the generators.

    Exact mode runs the same fixed point with row reduction over the
    generators' quadratic field; it is chosen automatically for exact
    generators with N <= 4 and falls back to floating arithmetic when the
    entries do not share one field.
    """
    n = _check_generators(generators)
    if exact is None:
        exact = n <= EXACT_CLOSURE_MAX_MODES and all(g.is_exact for g in generators)
    if exact and all(g.is_exact for g in generators):
        try:
            return _exact_closure(n, generators)
        except DomainError as exc:
            logger.debug("exact closure unavailable (%s); using floating arithmetic", exc)
    return _float_closure(n, generators, rank_tol)


def is_full(span: LieSpan) -> bool:
    return span.dim == algebra_dimension(span.dimension_n)


def is_semisimple(span: LieSpan, rank_tol: float = RANK_TOL) -> bool:
    """
    A subalgebra of so(N) is compact, hence reductive, so it is semisimple
    exactly when its derived algebra is the whole span.
    """
    if span.dim == 0:
        return False
    vectors: List[np.ndarray] = []
    for j in range(span.dim):
        for i in range(j):
            _insert(vectors, commutator(span.basis[i], span.basis[j]).coordinates(), rank_tol)
    return len(vectors) == span.dim


def is_abelian(span: LieSpan, rank_tol: float = RANK_TOL) -> bool:
    """True when every bracket of basis elements vanishes."""
    return all(commutator(span.basis[i], span.basis[j]).norm() <= rank_tol
               for j in range(span.dim) for i in range(j))


def _brackets_match(X: SkewMatrix, Y: SkewMatrix, Z: SkewMatrix, tol: float) -> bool:
    pairs = ((X, Y, Z), (Z, X, Y), (Y, Z, X))
    return all(np.max(np.abs(commutator(a, b).entries - c.entries)) < tol for a, b, c in pairs)


def identify_so3_xyz(span: LieSpan, tol: float = STRUCTURE_TOL
                     ) -> Optional[Tuple[SkewMatrix, SkewMatrix, SkewMatrix]]:
    """
    Basis (X, Y, Z) of a three-dimensional span with [X,Y]=Z, [Z,X]=Y, [Y,Z]=X.

    For the trivial-action subalgebra of so(4) the triple is built from the
    four embedded generators; any other span is fitted from its orthonormal
    basis, whose structure constants are lambda * epsilon_ijk because the
    trace form is ad-invariant.
    """
    if span.dim != 3:
        return None
    if span.dimension_n == 4:
        from services.perm_orbit import trivial_action_generators

        generators = trivial_action_generators(4)
        if all(span.contains(g) for g in generators.values()):
            a123, a234 = generators[(0, 1, 2)], generators[(1, 2, 3)]
            a134, a124 = generators[(0, 2, 3)], generators[(0, 1, 3)]
            X = (a123 + a234 + a134 + a124).scaled(QuadSurd(1, 4))
            Y = (a123 + a234 - a134 - a124).scaled(QuadSurd(1, 4))
            Z = (a123 - a234 - a134 + a124).scaled(QuadSurd(-1, 4))
            if _brackets_match(X, Y, Z, tol):
                return X, Y, Z
    b1, b2, b3 = span.basis
    lam = commutator(b1, b2).inner(b3)
    if abs(lam) < tol:
        return None
    X, Y, Z = (SkewMatrix(b.entries / lam) for b in (b1, b2, b3))
    if _brackets_match(X, Y, Z, tol * max(1.0, 1.0 / abs(lam))):
        return X, Y, Z
    return None


def bracket_determinant(X: SkewMatrix, Y: SkewMatrix) -> Tuple[float, float]:
    """
    Determinant of the coordinate rows (X, Y, [X, Y]) in so(3), and the value
    -(M31^2 + M32^2 + M33^2) built from the 2x2 minors of the first two rows.
    Both vanish exactly when X and Y are linearly dependent.
    """
    if X.dimension != 3 or Y.dimension != 3:
        raise DimensionError("bracket_determinant works in so(3)")
    x, y = X.coordinates(), Y.coordinates()
    rows = np.vstack([x, y, commutator(X, Y).coordinates()])
    minors = (x[1] * y[2] - x[2] * y[1], x[0] * y[2] - x[2] * y[0], x[0] * y[1] - x[1] * y[0])
    return float(np.linalg.det(rows)), -float(sum(m * m for m in minors))


@dataclass(frozen=True, eq=False)
class BasisChangeReport:
    """Coordinates (columns) of product logarithms in a standard basis."""

    theta: float
    matrix: np.ndarray
    determinant: float
    closed_form: Optional[float]
    columns: Tuple[str, ...] = field(default=())
    rows: Tuple[str, ...] = field(default=())


def _half_terms(theta: float) -> Tuple[float, float]:
    # p = cos^2(theta/2), h = sin(theta)/2
    return math.cos(theta / 2.0) ** 2, 0.5 * math.sin(theta)


def _product_scale(theta: float, principal: bool = True) -> float:
    """Common factor k of every coordinate: (arcsin(d)/d) sin(theta) for equal angles."""
    p, _ = _half_terms(theta)
    s = math.sin(theta)
    d = abs(s) * math.sqrt(2.0 * p * p + 0.25 * s * s)
    if d == 0.0:
        return s
    if principal:
        return math.asin(min(d, 1.0)) / d * s
    psi = math.atan2(d, 2.0 * p * p - 1.0)
    return psi / d * s


def bch_determinant_factor(theta: float) -> float:
    """-2 cos^6(t/2) - cos^4(t/2) sin(t)/2 - sin^3(t)/8."""
    p, h = _half_terms(theta)
    return -2.0 * p ** 3 - h * p * p - h ** 3


def bch_determinant_closed_form(theta: float) -> float:
    """Closed form of the three-mode basis-change determinant, defined for every theta."""
    return _product_scale(theta) ** 3 * bch_determinant_factor(theta)


def _so3_block(theta: float) -> np.ndarray:
    p, h = _half_terms(theta)
    # columns BCH(X12,X13), BCH(X12,X23), BCH(X13,X23); rows E12, E13, E23
    return np.array([[p, p, -h], [p, h, p], [-h, p, p]]).T


def bch_basis_matrix_so3(theta: float) -> BasisChangeReport:
    """
    Coordinates of BCH(X12, X13), BCH(X12, X23), BCH(X13, X23) over
    (E12, E13, E23), with X_kl = theta E_kl, computed through the principal
    arcsin form.
    """
    if not 0.0 < theta < 2.0 * math.pi:
        raise DomainError(f"theta must lie in (0, 2 pi), got {theta!r}")
    X12, X13, X23 = (basis_element(3, k, l).scaled(theta) for k, l in ((0, 1), (0, 2), (1, 2)))
    columns = [bch_orthogonal(X, Y, principal=True).coordinates()
               for X, Y in ((X12, X13), (X12, X23), (X13, X23))]
    matrix = np.column_stack(columns)
    determinant = float(np.linalg.det(matrix))
    return BasisChangeReport(theta, matrix, determinant, bch_determinant_closed_form(theta),
                             ("O12O13", "O12O23", "O13O23"), ("E12", "E13", "E23"))


def bch_determinant_zeros(samples: int = 10_000, tol: float = 1e-12) -> List[float]:
    """
    Zeros of the basis-change determinant on (0, 2 pi).

    The scale factor vanishes only with sin(theta); the remaining factor
    changes sign at each of its roots, which brentq localizes from a grid.
    """
    grid = np.linspace(0.0, 2.0 * math.pi, samples + 1)[1:-1]
    values = [bch_determinant_factor(t) for t in grid]
    zeros = [math.pi]
    for left, right, f_left, f_right in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if f_left == 0.0:
            zeros.append(float(left))
        elif f_left * f_right < 0.0:
            zeros.append(brentq(bch_determinant_factor, left, right, xtol=tol))
    zeros.sort()
    merged: List[float] = []
    for z in zeros:
        if not merged or z - merged[-1] > 1e-7:
            merged.append(z)
    return merged


def bch_factor_tan_roots() -> List[float]:
    """
    Real roots in t = tan(theta/4) of the determinant factor, apart from the
    roots t = +-1 coming from cos(theta/2) = 0.

    With u = 1 - t^2 the factor is a multiple of (u + 2t)(u^2 - t u + 2 t^2);
    only the first term has real roots.
    """
    t = Polynomial([0.0, 1.0])
    u = 1.0 - t * t
    remainder = u ** 3 + t * u ** 2 + 4.0 * t ** 3
    roots = remainder.roots()
    return sorted(float(r.real) for r in roots if abs(r.imag) < 1e-9)


def _product(n: int, label: ProductLabel, theta: float) -> RotationMatrix:
    (a, b), (c, d) = label
    return planar_rotation(n, a, b, theta) @ planar_rotation(n, c, d, theta)


def _generating_labels(n: int, offset: int = 0, block_order: bool = False) -> List[ProductLabel]:
    o = offset
    if n == 3:
        return [((o, o + 1), (o, o + 2)), ((o, o + 1), (o + 1, o + 2)), ((o, o + 2), (o + 1, o + 2))]
    tail = [((o, o + 1), (o + 1, o + k)) for k in range(2, n)]
    closing = [((o, o + 2), (o + 1, o + 2))]
    added = closing + tail if block_order else tail + closing
    return _generating_labels(n - 1, offset + 1, block_order) + added


def build_generating_set(n: int, theta: float) -> List[Tuple[ProductLabel, RotationMatrix]]:
    """
    S^(N): S^(3) = {O12 O13, O12 O23, O13 O23}; S^(N) is S^(N-1) on modes
    2..N together with R^(N) = {O12 O23, O12 O24, ..., O12 O2N, O13 O23}.
    """
    if n < 3:
        raise DomainError(f"generating sets need at least 3 modes, got {n}")
    return [(label, _product(n, label, theta)) for label in _generating_labels(n)]


def _structured_basis(n: int, offset: int = 0) -> List[Tuple[int, int]]:
    if n == 3:
        o = offset
        return [(o, o + 1), (o, o + 2), (o + 1, o + 2)]
    return _structured_basis(n - 1, offset + 1) + [(offset, offset + k) for k in range(1, n)]


def _bch_of_product(n: int, label: ProductLabel, theta: float, principal: bool) -> np.ndarray:
    (a, b), (c, d) = label
    modes = sorted({a, b, c, d})
    local = {mode: i for i, mode in enumerate(modes)}
    X = basis_element(3, local[a], local[b]).scaled(theta)
    Y = basis_element(3, local[c], local[d]).scaled(theta)
    Z = bch_orthogonal(X, Y, principal=principal).entries
    full = np.zeros((n, n))
    full[np.ix_(modes, modes)] = Z
    return full


def label_text(label: ProductLabel) -> str:
    (a, b), (c, d) = label
    return f"O{a + 1}{b + 1}O{c + 1}{d + 1}"


def p_block_matrix(n: int, theta: float) -> np.ndarray:
    """
    Coordinates of R^(N) over E12..E1N, columns O13 O23, O12 O23, ..., O12 O2N,
    without the common scale factor.
    """
    if n < 4:
        raise DomainError(f"the P block needs at least 4 modes, got {n}")
    p, h = _half_terms(theta)
    block = np.zeros((n - 1, n - 1))
    block[0, 0], block[1, 0] = -h, p
    for k in range(1, n - 1):
        block[0, k] = p
        block[k, k] = h
    return block


def p_block_determinant(n: int, theta: float) -> float:
    """-(1/2)^(N-3) sin^(N-3)(theta) (sin^2(theta)/4 + cos^4(theta/2))."""
    if n < 4:
        raise DomainError(f"the P block needs at least 4 modes, got {n}")
    p, h = _half_terms(theta)
    return -(h ** (n - 3)) * (h * h + p * p)


def generating_set_basis_matrix(n: int, theta: float, principal: bool = True) -> BasisChangeReport:
    """
    Coordinates of the logarithms of S^(N) in the standard basis of so(N).

    Rows follow the recursive order (basis of modes 2..N, then E12..E1N) and
    columns the matching order of products, which makes the matrix block
    upper triangular with the S^(3) block and one P block per added mode.
    """
    if n < 3:
        raise DomainError(f"generating sets need at least 3 modes, got {n}")
    rows = _structured_basis(n)
    labels = _generating_labels(n, block_order=True)
    matrix = np.zeros((len(rows), len(labels)))
    for j, label in enumerate(labels):
        Z = _bch_of_product(n, label, theta, principal)
        for i, (k, l) in enumerate(rows):
            matrix[i, j] = Z[k, l]
    determinant = float(np.linalg.det(matrix))
    scale = _product_scale(theta, principal)
    closed = scale ** len(labels) * bch_determinant_factor(theta)
    for size in range(4, n + 1):
        closed *= p_block_determinant(size, theta)
    return BasisChangeReport(theta, matrix, determinant, closed,
                             tuple(label_text(l) for l in labels),
                             tuple(f"E{k + 1}{l + 1}" for k, l in rows))
