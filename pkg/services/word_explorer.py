"""
Word Explorer Module - Empirical checks on the group generated by a finite
set of rotations.

Words are enumerated breadth first in complete length shells. Length counts
syllables, so A^3 B^-1 has length 2. Generators with a declared finite order
p take exponents 1..p-1; free generators take +-1..+-max_exponent.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.transform import Rotation
from scipy.stats import special_ortho_group

from services.errors import BudgetError, DimensionError, DomainError, PreconditionError
from services.exact_scalar import QuadSurd
from services.matrices import (
    RotationMatrix,
    exact_identity,
    exact_product,
    index_pairs,
    planar_rotation,
    rotation_distance,
)

logger = logging.getLogger(__name__)

WORD_BUDGET = 10 ** 7
IDENTITY_TOL = 1e-9
HISTOGRAM_BINS = 20
# sample-by-word distance blocks are evaluated this many words at a time
DISTANCE_CHUNK = 4096

Orders = Optional[Sequence[Optional[int]]]


@dataclass(frozen=True)
class Word:
    """A freely reduced word: no zero exponents, adjacent letters use distinct generators."""

    letters: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        letters = tuple((int(index), int(exponent)) for index, exponent in self.letters)
        for position, (index, exponent) in enumerate(letters):
            if index < 0:
                raise DomainError(f"negative generator index {index}")
            if exponent == 0:
                raise DomainError(f"zero exponent at position {position}")
            if position and letters[position - 1][0] == index:
                raise DomainError(f"letters {position - 1} and {position} use the same generator")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def reduce(cls, letters: Sequence[Tuple[int, int]], orders: Orders = None) -> Word:
        """
        Free reduction: merge neighbours on the same generator and drop
        what cancels. Exponents of generators with a declared order are
        taken modulo that order.
        """
        stack: List[List[int]] = []
        for index, exponent in letters:
            order = orders[index] if orders is not None and index < len(orders) else None
            if stack and stack[-1][0] == index:
                stack[-1][1] += exponent
            else:
                stack.append([index, exponent])
            if order:
                stack[-1][1] %= order
            if stack[-1][1] == 0:
                stack.pop()
        return cls(tuple((index, exponent) for index, exponent in stack))

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: Word) -> Word:
        return Word.reduce(self.letters + other.letters)

    def inverse(self) -> Word:
        return Word(tuple((index, -exponent) for index, exponent in reversed(self.letters)))

    def evaluate(self, generators: Sequence[RotationMatrix]) -> RotationMatrix:
        """Left-to-right product of generator powers; the empty word is I."""
        if not generators:
            raise PreconditionError("no generators to evaluate against")
        result = RotationMatrix.identity(generators[0].dimension)
        for index, exponent in self.letters:
            if index >= len(generators):
                raise IndexError(f"word uses generator {index} but only {len(generators)} given")
            result = result @ generators[index].power(exponent)
        return result

    def to_list(self) -> List[List[int]]:
        return [[index, exponent] for index, exponent in self.letters]

    def __str__(self) -> str:
        if not self.letters:
            return "I"
        parts = []
        for index, exponent in self.letters:
            name = chr(ord("A") + index) if index < 26 else f"g{index}"
            parts.append(name if exponent == 1 else f"{name}^{exponent}")
        return " ".join(parts)


@dataclass(frozen=True)
class CoverageReport:
    max_len: int
    sample_count: int
    covering_radius: float
    histogram: List[int]
    bin_edges: List[float]
    seed: int
    word_count: int
    mean_distance: float = 0.0
    distances: List[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "max_len": self.max_len,
            "sample_count": self.sample_count,
            "covering_radius": self.covering_radius,
            "mean_distance": self.mean_distance,
            "histogram": list(self.histogram),
            "bin_edges": list(self.bin_edges),
            "seed": self.seed,
            "word_count": self.word_count,
        }


def beamsplitter_generators(n: int, theta: float, cos_exact: Optional[QuadSurd] = None,
                            sin_exact: Optional[QuadSurd] = None) -> List[RotationMatrix]:
    """The two-mode beamsplitter O_kl(theta) on every pair of modes k < l."""
    return [planar_rotation(n, k, l, theta, cos_exact, sin_exact) for k, l in index_pairs(n)]


def exponent_alphabet(orders: Orders, count: int, max_exponent: int = 1) -> List[List[int]]:
    """
    Allowed exponents per generator, in the order words are produced.

    Args:
        orders: declared order per generator, None entries for free generators
        count: number of generators
        max_exponent: bound on |exponent| for free generators

    Returns:
        list: one exponent list per generator
    """
    if orders is not None and len(orders) != count:
        raise DimensionError(f"{len(orders)} orders declared for {count} generators")
    if max_exponent < 1:
        raise DomainError(f"max_exponent must be at least 1, got {max_exponent}")
    alphabet = []
    for index in range(count):
        order = orders[index] if orders is not None else None
        if order is not None:
            if order < 1:
                raise DomainError(f"generator {index} has non-positive order {order}")
            alphabet.append(list(range(1, order)))
        else:
            alphabet.append([sign * e for e in range(1, max_exponent + 1) for sign in (1, -1)])
    return alphabet


def projected_word_count(alphabet: Sequence[Sequence[int]], max_len: int) -> int:
    """Exact number of nonempty reduced words of length <= max_len."""
    sizes = [len(exponents) for exponents in alphabet]
    ending = list(sizes)
    total = sum(ending)
    for _ in range(1, max_len):
        shell = sum(ending)
        ending = [size * (shell - last) for size, last in zip(sizes, ending)]
        total += sum(ending)
    return total


def _check_generators(generators: Sequence[RotationMatrix], max_len: int) -> int:
    if not generators:
        raise PreconditionError("at least one generator is required")
    if max_len < 1:
        raise DomainError(f"max_len must be at least 1, got {max_len}")
    n = generators[0].dimension
    if any(g.dimension != n for g in generators):
        raise DimensionError("generators act on different numbers of modes")
    return n


def _shells(generators: Sequence[RotationMatrix], max_len: int, orders: Orders,
            max_exponent: int, budget: int, exact: Optional[bool] = None,
            track_words: bool = True) -> Iterator[Tuple[int, Optional[List[Word]], object]]:
    """
    Yield (length, words, matrices) for each length shell.

    matrices is a float array of shape (count, N, N), or a list of exact
    object arrays when every generator carries exact entries. words is None
    when track_words is off; only the last generator of each word is kept.
    """
    n = _check_generators(generators, max_len)
    alphabet = exponent_alphabet(orders, len(generators), max_exponent)
    projected = projected_word_count(alphabet, max_len)
    if projected > budget:
        raise BudgetError(f"{projected} words up to length {max_len} exceed the budget of {budget}")
    if exact is None:
        exact = all(g.is_exact for g in generators)
    logger.debug("enumerating %d words up to length %d (%s arithmetic)",
                 projected, max_len, "exact" if exact else "float")

    powers = [{e: g.power(e) for e in exponents} for g, exponents in zip(generators, alphabet)]
    if exact:
        tables = [p.exact for table in powers for p in table.values()]
        if any(p is None for p in tables) or any(
                exact_product(a, b) is None for a in tables[:1] for b in tables):
            exact = False

    words: Optional[List[Word]] = [] if track_words else None
    last_letters: List[int] = []
    matrices: list = []
    for index, table in enumerate(powers):
        for exponent, power in table.items():
            if words is not None:
                words.append(Word(((index, exponent),)))
            last_letters.append(index)
            matrices.append(power.exact if exact else power.entries)
    last = np.array(last_letters, dtype=int)
    shell = matrices if exact else np.array(matrices).reshape(-1, n, n)
    yield 1, words, shell

    for length in range(2, max_len + 1):
        next_words: Optional[List[Word]] = [] if track_words else None
        next_last: List[np.ndarray] = []
        next_matrices: list = []
        for index, table in enumerate(powers):
            keep = np.flatnonzero(last != index)
            if keep.size == 0:
                continue
            selected = None if exact else shell[keep]
            for exponent, power in table.items():
                if next_words is not None:
                    letter = ((index, exponent),)
                    next_words.extend(Word(words[k].letters + letter) for k in keep)
                next_last.append(np.full(keep.size, index, dtype=int))
                if exact:
                    next_matrices.extend(shell[k].dot(power.exact) for k in keep)
                else:
                    next_matrices.append(selected @ power.entries)
        if not next_last:
            return
        words = next_words
        last = np.concatenate(next_last)
        shell = next_matrices if exact else np.concatenate(next_matrices)
        yield length, words, shell


def enumerate_words(generators: Sequence[RotationMatrix], max_len: int, orders: Orders = None,
                    max_exponent: int = 1, budget: int = WORD_BUDGET
                    ) -> Iterator[Tuple[Word, RotationMatrix]]:
    """
    Every nonempty reduced word of length <= max_len exactly once, shortest
    first, with its matrix.

    Raises:
        BudgetError: when the exact word count exceeds the budget
    """
    for _, words, shell in _shells(generators, max_len, orders, max_exponent, budget):
        for word, matrix in zip(words, shell):
            if matrix.dtype == object:
                yield word, RotationMatrix(None, matrix)
            else:
                yield word, RotationMatrix(matrix)


def identity_word_search(generators: Sequence[RotationMatrix], max_len: int,
                         tol: float = IDENTITY_TOL, orders: Orders = None,
                         max_exponent: Optional[int] = None,
                         budget: int = WORD_BUDGET) -> Optional[Word]:
    """
    First nonempty reduced word equal to the identity, or None.

    Exact generators are compared exactly and tol is ignored. Free
    generators take exponents up to max_exponent, which defaults to max_len.
    """
    if max_exponent is None:
        max_exponent = max_len
    n = _check_generators(generators, max_len)
    identity_exact = exact_identity(n)
    identity = np.eye(n)
    for length, words, shell in _shells(generators, max_len, orders, max_exponent, budget):
        if isinstance(shell, np.ndarray):
            deviation = np.max(np.abs(shell - identity), axis=(1, 2))
            hits = np.flatnonzero(deviation < tol)
            if hits.size:
                logger.debug("identity word at length %d: %s", length, words[hits[0]])
                return words[hits[0]]
        else:
            for word, matrix in zip(words, shell):
                if np.array_equal(matrix, identity_exact):
                    logger.debug("exact identity word at length %d: %s", length, word)
                    return word
    return None


def haar_samples(n: int, count: int, seed: int) -> np.ndarray:
    """
    count Haar-distributed elements of SO(n) as an array (count, n, n).

    SO(3) samples come from uniform unit quaternions.
    """
    if count < 1:
        raise DomainError(f"sample count must be at least 1, got {count}")
    if n < 2:
        raise DimensionError(f"SO({n}) has no samples to draw")
    rng = np.random.default_rng(seed)
    if n == 3:
        return Rotation.random(count, rng).as_matrix().reshape(count, 3, 3)
    return np.asarray(special_ortho_group.rvs(n, count, rng)).reshape(count, n, n)


def _nearest_distances(samples: np.ndarray, words: np.ndarray) -> np.ndarray:
    n = samples.shape[1]
    best = np.full(samples.shape[0], np.inf)
    flat = samples.reshape(samples.shape[0], -1)
    for start in range(0, words.shape[0], DISTANCE_CHUNK):
        block = words[start:start + DISTANCE_CHUNK]
        # tr(R S^T) is the entrywise dot product
        traces = flat @ block.reshape(block.shape[0], -1).T
        # arccos is decreasing, so the largest trace is the nearest word
        values = np.clip((traces.max(axis=1) - n + 2) / 2, -1.0, 1.0)
        best = np.minimum(best, np.arccos(values))
    return best


def covering_estimate(generators: Sequence[RotationMatrix], max_len: int, samples: int, seed: int,
                      orders: Orders = None, max_exponent: int = 1, budget: int = WORD_BUDGET,
                      bins: int = HISTOGRAM_BINS) -> CoverageReport:
    """
    Empirical covering radius of the words of length <= max_len.

    The identity (empty word) is always part of the word set, so the radius
    never exceeds the largest sampled rotation angle.

    Args:
        generators: rotations in SO(N), N >= 2
        max_len: longest word, in syllables
        samples: number of Haar samples
        seed: seed of the sample generator

    Returns:
        CoverageReport: radius, histogram of nearest-word distances, seed echo
    """
    n = _check_generators(generators, max_len)
    points = haar_samples(n, samples, seed)
    identity = np.eye(n)
    nearest = np.array([rotation_distance(point, identity) for point in points])
    word_count = 0
    for _, _, shell in _shells(generators, max_len, orders, max_exponent, budget, exact=False,
                               track_words=False):
        nearest = np.minimum(nearest, _nearest_distances(points, shell))
        word_count += shell.shape[0]
    histogram, edges = np.histogram(nearest, bins=bins, range=(0.0, math.pi))
    radius = float(nearest.max())
    logger.debug("covering radius %.6f over %d words, %d samples", radius, word_count, samples)
    return CoverageReport(max_len, samples, radius, histogram.tolist(), edges.tolist(), seed,
                          word_count, float(nearest.mean()), nearest.tolist())


def _quarter_turn(exponent: int, order: int) -> bool:
    return (4 * exponent) % (4 * order) in (order, 3 * order)


def has_nonidentity_shape(word: Word, orders: Sequence[int]) -> bool:
    """
    True iff the word has the non-identity shape for two rotations of
    orders (p, q) about orthogonal axes: nonempty, only generators 0 and 1,
    no exponent a multiple of p/2 (resp. q/2) and no two consecutive
    letters that are quarter turns.
    """
    if len(orders) != 2 or any(order is None or order < 1 for order in orders):
        raise PreconditionError(f"two finite orders are required, got {orders}")
    if not word.letters:
        return False
    quarter = []
    for index, exponent in word.letters:
        if index > 1:
            return False
        order = orders[index]
        if (2 * exponent) % order == 0:
            return False
        quarter.append(_quarter_turn(exponent, order))
    return not any(a and b for a, b in zip(quarter, quarter[1:]))
