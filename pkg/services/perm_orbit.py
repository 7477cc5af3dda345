"""
Permutation Orbit Module - Conjugates of a beamsplitter under mode
permutations, trivial-action detection and mode-subset embeddings.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from services.errors import DimensionError, SizeError
from services.exact_scalar import QuadSurd
from services.matrices import RotationMatrix, SkewMatrix, exact_identity

logger = logging.getLogger(__name__)

ORBIT_MAX_MODES = 8
DEDUP_TOL = 1e-9
DIRECTION_TOL = 1e-9

# coefficients (a12, a13, a23) of the trivial direction E12 - E13 + E23
TRIVIAL_DIRECTION = (1, -1, 1)

Matrix = Union[RotationMatrix, SkewMatrix]


@dataclass(frozen=True)
class ModePermutation:
    """Bijection sigma of modes; conjugation sends A to B with B_ij = A_sigma(i)sigma(j)."""

    mapping: Tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise DimensionError(f"not a permutation: {self.mapping}")

    def conjugate(self, M: Matrix) -> Matrix:
        """P_sigma^T M P_sigma."""
        perm = list(self.mapping)
        entries = M.entries[np.ix_(perm, perm)]
        exact = M.exact[np.ix_(perm, perm)] if M.exact is not None else None
        if exact is not None:
            return type(M)(None, exact)
        return type(M)(entries)

    @classmethod
    def all(cls, m: int) -> List[ModePermutation]:
        return [cls(p) for p in permutations(range(m))]


@dataclass(frozen=True, eq=False)
class OrbitSet:
    base: RotationMatrix
    elements: List[RotationMatrix]
    trivial: bool
    permutations: List[ModePermutation]


def _same(left: RotationMatrix, right: RotationMatrix, tol: float) -> bool:
    if left.exact is not None and right.exact is not None:
        return bool(np.array_equal(left.exact, right.exact))
    return float(np.max(np.abs(left.entries - right.entries))) < tol


def orbit(O: RotationMatrix, dedup_tol: float = DEDUP_TOL, max_modes: int = ORBIT_MAX_MODES) -> OrbitSet:
    """
    S(O) = {P^T O P : P a mode permutation}, deduplicated.

    Elements keep the order of first appearance, so O comes first. The orbit
    is trivial when it holds nothing beyond O and O^-1.
    """
    m = O.dimension
    if m > max_modes:
        raise SizeError(f"orbit enumeration capped at {max_modes} modes, got {m}")
    elements: List[RotationMatrix] = []
    witnesses: List[ModePermutation] = []
    for sigma in ModePermutation.all(m):
        candidate = sigma.conjugate(O)
        if not any(_same(candidate, e, dedup_tol) for e in elements):
            elements.append(candidate)
            witnesses.append(sigma)
    inverse = O.inverse()
    trivial = all(_same(e, O, dedup_tol) or _same(e, inverse, dedup_tol) for e in elements)
    logger.debug("orbit of %dx%d rotation: %d elements, trivial=%s", m, m, len(elements), trivial)
    return OrbitSet(O, elements, trivial, witnesses)


def coefficient_vector(A: SkewMatrix) -> np.ndarray:
    """(a12, a13, a23) of a 3x3 skew matrix."""
    if A.dimension != 3:
        raise DimensionError(f"expected a 3x3 skew matrix, got {A.dimension}x{A.dimension}")
    e = A.entries
    return np.array([e[0, 1], e[0, 2], e[1, 2]])


def trivial_direction_distance(A: SkewMatrix) -> float:
    """Distance of the normalized coefficient line of A from the trivial direction."""
    v = coefficient_vector(A)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return float("inf")
    u = np.array(TRIVIAL_DIRECTION) / math.sqrt(3.0)
    w = v / norm
    return float(min(np.linalg.norm(w - u), np.linalg.norm(w + u)))


def is_trivial_action(A: SkewMatrix, direction_tol: float = DIRECTION_TOL) -> bool:
    """True iff (a12, a13, a23) is parallel to (1, -1, 1)."""
    coefficients = A.exact_coordinates() if A.dimension == 3 else None
    if coefficients is not None:
        a12, a13, a23 = coefficients
        return bool(a12) and a13 == -a12 and a23 == a12
    distance = trivial_direction_distance(A)
    if distance < direction_tol:
        return True
    if distance < 1e3 * direction_tol:
        logger.warning("trivial-action test is borderline: direction distance %.3e", distance)
    return False


def _check_subset(m: int, target_n: int, modes: Sequence[int]) -> List[int]:
    modes = list(modes)
    if target_n < m:
        raise IndexError(f"cannot embed {m} modes into {target_n}")
    if len(modes) != m or any(b <= a for a, b in zip(modes, modes[1:])) \
            or (modes and (modes[0] < 0 or modes[-1] >= target_n)):
        raise IndexError(f"malformed mode subset {modes} for {m} of {target_n} modes")
    return modes


def embed(M: Matrix, target_n: int, modes: Sequence[int]) -> Matrix:
    """
    Place M on the given rows and columns; the other diagonal entries are 1
    for rotations and 0 for skew matrices.
    """
    m = M.dimension
    modes = _check_subset(m, target_n, modes)
    fill = 1 if isinstance(M, RotationMatrix) else 0
    if M.exact is not None:
        exact = exact_identity(target_n) if fill else np.full((target_n, target_n), QuadSurd(0), dtype=object)
        exact[np.ix_(modes, modes)] = M.exact
        return type(M)(None, exact)
    entries = np.eye(target_n) if fill else np.zeros((target_n, target_n))
    entries[np.ix_(modes, modes)] = M.entries
    return type(M)(entries)


def all_embeddings(M: Matrix, target_n: int) -> List[Matrix]:
    """embed over all C(target_n, m) subsets in lexicographic order."""
    if target_n < M.dimension:
        raise IndexError(f"cannot embed {M.dimension} modes into {target_n}")
    return [embed(M, target_n, subset) for subset in combinations(range(target_n), M.dimension)]


def trivial_generator() -> SkewMatrix:
    """A = E12 - E13 + E23."""
    return SkewMatrix.from_coordinates(3, list(TRIVIAL_DIRECTION))


def trivial_action_generators(k: int) -> Dict[Tuple[int, ...], SkewMatrix]:
    """Exact embeddings A_ijk of the trivial generator into so(k), keyed by zero-based modes."""
    if k < 3:
        raise DimensionError(f"need at least 3 modes, got {k}")
    A = trivial_generator()
    return {subset: embed(A, k, subset) for subset in combinations(range(k), 3)}
