"""
Angle Classifier Module - Decide whether rotation angles are rational
multiples of pi, exactly from quadratic-surd cosines or numerically from
floating angles, and read rotation angles off orthogonal spectra.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
from mpmath import mp
from sympy import totient

from services.errors import DomainError
from services.exact_scalar import (
    QuadSurd,
    Scalar,
    cyclotomic,
    is_cyclotomic,
    min_poly_unit_complex,
)
from services.matrices import RotationMatrix
from services.so3_kernel import product_angle_cosine

logger = logging.getLogger(__name__)

Q_MAX = 10_000
ANGLE_TOL = 1e-9
ZERO_ANGLE_TOL = 1e-9


class AngleKind(str, Enum):
    RATIONAL_PI = "RationalPi"
    IRRATIONAL_PI = "IrrationalPi"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class AngleClass:
    """
    Outcome of classifying an angle.

    RationalPi angles are stored as p*pi/q with gcd(p, q) = 1 and 0 <= p < 2q.
    """

    kind: AngleKind
    p: Optional[int] = None
    q: Optional[int] = None
    certificate: str = ""

    @classmethod
    def rational(cls, p: int, q: int, certificate: str = "") -> AngleClass:
        value = Fraction(p, q) % 2
        return cls(AngleKind.RATIONAL_PI, value.numerator, value.denominator, certificate)

    @classmethod
    def irrational(cls, certificate: str = "") -> AngleClass:
        return cls(AngleKind.IRRATIONAL_PI, certificate=certificate)

    @classmethod
    def unknown(cls, certificate: str = "") -> AngleClass:
        return cls(AngleKind.UNKNOWN, certificate=certificate)

    @property
    def is_rational(self) -> bool:
        return self.kind is AngleKind.RATIONAL_PI

    @property
    def is_irrational(self) -> bool:
        return self.kind is AngleKind.IRRATIONAL_PI

    @property
    def radians(self) -> Optional[float]:
        if not self.is_rational:
            return None
        return math.pi * self.p / self.q

    def to_dict(self) -> dict:
        data = {"kind": self.kind.value, "certificate": self.certificate}
        if self.is_rational:
            data["p"], data["q"] = self.p, self.q
        return data


@dataclass(frozen=True)
class SpectrumAngles:
    angles: Tuple[float, ...]
    plus_one_multiplicity: int


@dataclass(frozen=True)
class DensityResult:
    """Truth value plus certificate; ``dense`` is None when undecided."""

    dense: Optional[bool]
    classes: Tuple[AngleClass, ...] = field(default=())
    certificate: str = ""


@dataclass(frozen=True)
class DegreeTwoAngle:
    p: int
    q: int
    cosine: QuadSurd
    product_cosine: QuadSurd
    product_class: AngleClass


def primitive_order(p: int, q: int) -> int:
    """Order n of e^{i p pi/q} as a root of unity."""
    if q <= 0:
        raise DomainError(f"denominator must be positive, got {q}")
    return 2 * q // math.gcd(p, 2 * q)


def rational_cosine(p: int, q: int) -> Optional[QuadSurd]:
    """
    Exact cos(p*pi/q) when it has degree at most two, else None.

    Uses the palindromic cyclotomic polynomial of the order n of e^{i p pi/q}:
    with y = x + 1/x = 2cos, degree-four polynomials reduce to
    y^2 + c3*y + (c2 - 2) = 0.
    """
    n = primitive_order(p, q)
    degree = int(totient(n))
    if degree > 4:
        return None
    coefficients = cyclotomic(n).coefficients
    if degree == 1:
        return QuadSurd(1 if n == 1 else -1)
    if degree == 2:
        return QuadSurd(Fraction(-coefficients[1], 2))
    c3, c2 = coefficients[3], coefficients[2]
    radicand = c3 * c3 - 4 * (c2 - 2)
    target = 2.0 * math.cos(math.pi * p / q)
    roots = [QuadSurd(Fraction(-c3, 2), Fraction(sign, 2), radicand) for sign in (1, -1)]
    best = min(roots, key=lambda y: abs(float(y) - target))
    return best / 2


def classify_exact(cos_theta: Scalar) -> AngleClass:
    """
    Classify theta in [0, pi] from its exact cosine.

    e^{i theta} is a root of unity iff its minimal polynomial is cyclotomic;
    the multiple 2k/n is recovered by exact comparison of cosines over the
    k coprime to n.
    """
    cos_theta = QuadSurd.coerce(cos_theta)
    if abs(cos_theta) > 1:
        raise DomainError(f"|cos| exceeds one: {cos_theta}")
    poly = min_poly_unit_complex(cos_theta)
    n = is_cyclotomic(poly)
    if n is None:
        reason = "non-integer coefficients" if not poly.has_integer_coefficients else "no cyclotomic match"
        logger.debug("cos=%s: %s is not cyclotomic", cos_theta, poly)
        return AngleClass.irrational(f"min poly {poly} is not cyclotomic ({reason})")
    for k in range(0, n // 2 + 1):
        if math.gcd(k, n) != 1:
            continue
        if rational_cosine(2 * k, n) == cos_theta:
            logger.debug("cos=%s: root of cyclotomic polynomial %d, k=%d", cos_theta, n, k)
            return AngleClass.rational(2 * k, n, f"min poly {poly} = Phi_{n}, angle 2*pi*{k}/{n}")
    raise DomainError(f"no primitive {n}-th root has cosine {cos_theta}")


def _convergents(x, limit: int):
    h_prev, h = 1, int(mp.floor(x))
    k_prev, k = 0, 1
    yield h, k
    rest = x - mp.floor(x)
    while not mp.almosteq(rest, 0) and k <= limit:
        x = mp.fdiv(1, rest)
        a = int(mp.floor(x))
        rest = x - a
        h, h_prev = a * h + h_prev, h
        k, k_prev = a * k + k_prev, k
        yield h, k


def classify_numeric(theta: float, q_max: int = Q_MAX, tol: float = ANGLE_TOL) -> AngleClass:
    """
    Continued-fraction test of theta/pi against convergents with q <= q_max.

    Never returns IrrationalPi: floating data cannot rule out a large
    denominator.
    """
    if q_max < 1 or tol <= 0:
        raise DomainError("q_max must be positive and tol must be positive")
    with mp.workdps(50):
        ratio = mp.mpf(theta) / mp.pi
        ratio = ratio - 2 * mp.floor(ratio / 2)
        for p, q in _convergents(ratio, q_max):
            if q > q_max:
                break
            error = abs(ratio - mp.mpf(p) / q)
            if error < tol:
                logger.debug("theta=%r matches %d/%d within %s", theta, p, q, mp.nstr(error, 3))
                return AngleClass.rational(p, q, f"convergent {p}/{q} of theta/pi, error {mp.nstr(error, 3)}")
    return AngleClass.unknown(f"no convergent with q <= {q_max} within {tol}")


def spectrum_angles(R: RotationMatrix) -> SpectrumAngles:
    """Rotation angles in [0, pi], one per conjugate eigenvalue pair."""
    n = R.dimension
    if n == 2:
        angles = [math.atan2(abs(R.entries[1, 0]), R.entries[0, 0])]
    elif n == 3:
        angles = [float(np.arccos(np.clip((np.trace(R.entries) - 1.0) / 2.0, -1.0, 1.0)))]
    else:
        eigenvalues = np.linalg.eigvals(R.entries)
        phases = sorted(abs(float(np.angle(v))) for v in eigenvalues)
        # pairs are adjacent after sorting by |phase|; a lone +1 remains for odd n
        if n % 2:
            zero = min(range(len(phases)), key=lambda i: phases[i])
            phases.pop(zero)
        angles = [phases[i] for i in range(0, len(phases), 2)]
    plus_one = int(np.sum(np.abs(np.linalg.eigvals(R.entries) - 1.0) < 1e-7))
    return SpectrumAngles(tuple(sorted(angles)), plus_one)


def _exact_spectrum_cosines(R: RotationMatrix) -> Optional[List[QuadSurd]]:
    # exact cosines are available from the trace when one plane rotates
    if R.exact is None:
        return None
    trace = sum((R.exact[i, i] for i in range(R.dimension)), QuadSurd(0))
    angles = spectrum_angles(R).angles
    nonzero = [a for a in angles if a > ZERO_ANGLE_TOL]
    if len(nonzero) != 1:
        return None
    return [(trace - (R.dimension - 2)) / 2]


def dense_in_one_param(R: RotationMatrix, q_max: int = Q_MAX, tol: float = ANGLE_TOL) -> DensityResult:
    """
    True when every nonzero spectral angle is an irrational multiple of pi,
    so the powers of R are dense in a torus; None when numerics cannot decide.
    """
    exact = _exact_spectrum_cosines(R)
    if exact is not None:
        classes = tuple(classify_exact(c) for c in exact)
    else:
        angles = [a for a in spectrum_angles(R).angles if a > ZERO_ANGLE_TOL]
        classes = tuple(classify_numeric(a, q_max, tol) for a in angles)
    if not classes:
        return DensityResult(False, classes, "identity rotation")
    if any(c.is_rational for c in classes):
        return DensityResult(False, classes, "rational spectral angle")
    if all(c.is_irrational for c in classes):
        return DensityResult(True, classes, "all spectral angles irrational multiples of pi")
    return DensityResult(None, classes, "spectral angle not certified irrational")


def degree_two_cosines() -> List[DegreeTwoAngle]:
    """
    Every p*pi/q in [0, pi] whose cosine has degree two, with the exact
    cosine and the classification of the product angle of O12(t) O23(t).
    """
    results = []
    for n in sorted(m for m in range(1, 13) if totient(m) == 4):
        for k in range(1, n // 2 + 1):
            if math.gcd(k, n) != 1:
                continue
            value = Fraction(2 * k, n)
            cosine = rational_cosine(value.numerator, value.denominator)
            product = product_angle_cosine(cosine)
            results.append(DegreeTwoAngle(value.numerator, value.denominator, cosine,
                                          product, classify_exact(product)))
    return sorted(results, key=lambda entry: Fraction(entry.p, entry.q))


def rotation_order(angle_class: AngleClass) -> Optional[int]:
    """Order of a rotation by the classified angle; None for infinite or unknown order."""
    if not angle_class.is_rational:
        return None
    return primitive_order(angle_class.p, angle_class.q)
