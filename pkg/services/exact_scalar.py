"""
Exact Scalar Module - Exact arithmetic over Q and real quadratic fields.

Provides the QuadSurd number type (a + b*sqrt(c)), integer and rational
polynomials with ascending coefficient lists, and the cyclotomic machinery
used to decide whether e^{i*alpha} is a root of unity.
"""

from __future__ import annotations

import logging
import math
import re
from fractions import Fraction
from functools import lru_cache, total_ordering
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import divisors, factorint, totient

from services.errors import DomainError

logger = logging.getLogger(__name__)

Rational = Fraction
Scalar = Union[int, Fraction, "QuadSurd"]

_RATIONAL_RE = re.compile(r"^\s*([+-]?)\s*(\d+)\s*(?:/\s*(\d+)\s*)?$")
_SURD_RE = re.compile(
    r"^\s*(?P<outer>[+-]?)\s*\(\s*"
    r"(?:(?P<a>[+-]?\s*\d+(?:\s*/\s*\d+)?)\s*(?P<op>[+-])\s*|(?P<lead>[+-]?)\s*)"
    r"(?:(?P<b>\d+(?:\s*/\s*\d+)?)\s*\*\s*)?"
    r"sqrt\(\s*(?P<c>\d+)\s*\)\s*\)\s*$"
)


def rational_sqrt(value: Fraction) -> Optional[Fraction]:
    """Exact square root of a non-negative rational, or None if irrational."""
    value = Fraction(value)
    if value < 0:
        return None
    num = math.isqrt(value.numerator)
    den = math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


@lru_cache(maxsize=4096)
def split_square(n: int) -> Tuple[int, int]:
    """Write n = square**2 * core with core squarefree (n >= 1)."""
    square, core = 1, 1
    for prime, exponent in factorint(n).items():
        square *= prime ** (exponent // 2)
        core *= prime ** (exponent % 2)
    return square, core


def _parse_rational(text: str) -> Fraction:
    return Fraction(re.sub(r"\s+", "", text))


@total_ordering
class QuadSurd:
    """An element a + b*sqrt(c) of Q(sqrt(c)), kept in canonical form."""

    __slots__ = ("_a", "_b", "_c")

    def __init__(self, a: Union[int, Fraction] = 0, b: Union[int, Fraction] = 0, c: int = 1) -> None:
        a = Fraction(a)
        b = Fraction(b)
        c = int(c)
        if c < 1:
            raise DomainError(f"radicand must be a positive integer, got {c}")
        square, core = split_square(c) if c > 1 else (1, 1)
        b *= square
        if core == 1:
            a, b = a + b, Fraction(0)
        if b == 0:
            core = 1
        self._a: Fraction = a
        self._b: Fraction = b
        self._c: int = core

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @property
    def c(self) -> int:
        return self._c

    @property
    def is_rational(self) -> bool:
        return self._b == 0

    @classmethod
    def coerce(cls, value: Scalar) -> QuadSurd:
        if isinstance(value, QuadSurd):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        raise TypeError(f"cannot interpret {value!r} as an exact scalar")

    @classmethod
    def parse(cls, text: str) -> QuadSurd:
        """
        Parse the exact scalar grammar: ``p/q``, ``p`` or ``(a + b*sqrt(c))``.

        Raises:
            ValueError: if the text does not match the grammar
        """
        match = _RATIONAL_RE.match(text)
        if match:
            sign, num, den = match.groups()
            value = Fraction(int(num), int(den) if den else 1)
            return cls(-value if sign == "-" else value)
        match = _SURD_RE.match(text)
        if not match:
            raise ValueError(f"not an exact scalar: {text!r}")
        a = _parse_rational(match.group("a")) if match.group("a") else Fraction(0)
        b = _parse_rational(match.group("b")) if match.group("b") else Fraction(1)
        if (match.group("op") or match.group("lead")) == "-":
            b = -b
        value = cls(a, b, int(match.group("c")))
        return -value if match.group("outer") == "-" else value

    def _common_radicand(self, other: QuadSurd) -> int:
        if self._c == 1:
            return other.c
        if other.c == 1 or other.c == self._c:
            return self._c
        raise DomainError(f"cannot mix Q(sqrt({self._c})) and Q(sqrt({other.c}))")

    def __repr__(self) -> str:
        return f"QuadSurd({self._a}, {self._b}, {self._c})"

    def __str__(self) -> str:
        if self.is_rational:
            return str(self._a)
        if self._a == 0:
            return f"({self._b}*sqrt({self._c}))"
        op = "+" if self._b > 0 else "-"
        return f"({self._a} {op} {abs(self._b)}*sqrt({self._c}))"

    def __float__(self) -> float:
        return float(self._a) + float(self._b) * math.sqrt(self._c)

    def __complex__(self) -> complex:
        return complex(float(self))

    def __hash__(self) -> int:
        if self.is_rational:
            return hash(self._a)
        return hash((self._a, self._b, self._c))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational and self._a == other
        if isinstance(other, QuadSurd):
            return self._a == other.a and self._b == other.b and self._c == other.c
        return NotImplemented

    def __lt__(self, other: Scalar) -> bool:
        if not isinstance(other, (int, Fraction, QuadSurd)):
            return NotImplemented
        return (self - other).sign() < 0

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(c)."""
        sa = (self._a > 0) - (self._a < 0)
        sb = (self._b > 0) - (self._b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        return sa if self._a * self._a > self._b * self._b * self._c else sb

    def __neg__(self) -> QuadSurd:
        return QuadSurd(-self._a, -self._b, self._c)

    def __pos__(self) -> QuadSurd:
        return self

    def __abs__(self) -> QuadSurd:
        return -self if self.sign() < 0 else self

    def __add__(self, other: Scalar) -> QuadSurd:
        if not isinstance(other, (int, Fraction, QuadSurd)):
            return NotImplemented
        other = QuadSurd.coerce(other)
        c = self._common_radicand(other)
        return QuadSurd(self._a + other.a, self._b + other.b, c)

    def __radd__(self, other: Scalar) -> QuadSurd:
        return self + other

    def __sub__(self, other: Scalar) -> QuadSurd:
        if not isinstance(other, (int, Fraction, QuadSurd)):
            return NotImplemented
        return self + (-QuadSurd.coerce(other))

    def __rsub__(self, other: Scalar) -> QuadSurd:
        return (-self) + other

    def __mul__(self, other: Scalar) -> QuadSurd:
        if not isinstance(other, (int, Fraction, QuadSurd)):
            return NotImplemented
        other = QuadSurd.coerce(other)
        c = self._common_radicand(other)
        return QuadSurd(
            self._a * other.a + self._b * other.b * c,
            self._a * other.b + self._b * other.a,
            c,
        )

    def __rmul__(self, other: Scalar) -> QuadSurd:
        return self * other

    def conjugate(self) -> QuadSurd:
        return QuadSurd(self._a, -self._b, self._c)

    def norm(self) -> Fraction:
        """Field norm a^2 - b^2*c."""
        return self._a * self._a - self._b * self._b * self._c

    def inverse(self) -> QuadSurd:
        if not self:
            raise ZeroDivisionError("inverse of zero")
        n = self.norm()
        conj = self.conjugate()
        return QuadSurd(conj.a / n, conj.b / n, self._c)

    def __truediv__(self, other: Scalar) -> QuadSurd:
        if not isinstance(other, (int, Fraction, QuadSurd)):
            return NotImplemented
        return self * QuadSurd.coerce(other).inverse()

    def __rtruediv__(self, other: Scalar) -> QuadSurd:
        return QuadSurd.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> QuadSurd:
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = QuadSurd(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def sqrt(self) -> Optional[QuadSurd]:
        """
        Non-negative square root when it lies in Q or in the same field.

        Returns:
            QuadSurd or None: the root, or None when it is not expressible
        """
        if self.sign() < 0:
            return None
        if not self:
            return QuadSurd(0)
        if self.is_rational:
            # sqrt(n/d) = sqrt(n*d)/d
            return QuadSurd(0, Fraction(1, self._a.denominator), self._a.numerator * self._a.denominator)
        root_norm = rational_sqrt(self.norm())
        if root_norm is None:
            return None
        for x_squared in ((self._a + root_norm) / 2, (self._a - root_norm) / 2):
            x = rational_sqrt(x_squared)
            if not x:
                continue
            candidate = abs(QuadSurd(x, self._b / (2 * x), self._c))
            if candidate * candidate == self:
                return candidate
        return None


class IntPolynomial:
    """
    Polynomial with integer coefficients, stored in ascending degree.

    Trailing zero coefficients are stripped, so the zero polynomial has an
    empty coefficient tuple and degree -1.
    """

    def __init__(self, coefficients: Sequence[Union[int, Fraction]]) -> None:
        coeffs = [self._coerce(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self._coefficients = tuple(coeffs)

    @staticmethod
    def _coerce(value):
        value = Fraction(value)
        if value.denominator != 1:
            raise DomainError(f"non-integer coefficient {value}")
        return int(value)

    @classmethod
    def unity(cls, n: int) -> IntPolynomial:
        """The polynomial x^n - 1."""
        return cls([-1] + [0] * (n - 1) + [1])

    @property
    def coefficients(self) -> tuple:
        return self._coefficients

    @property
    def degree(self) -> int:
        return len(self._coefficients) - 1

    @property
    def leading(self):
        return self._coefficients[-1] if self._coefficients else 0

    @property
    def is_zero(self) -> bool:
        return not self._coefficients

    @property
    def is_monic(self) -> bool:
        return self.leading == 1

    @property
    def has_integer_coefficients(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in self._coefficients)

    def to_rational(self) -> RatPolynomial:
        return RatPolynomial(self._coefficients)

    def to_integer(self) -> IntPolynomial:
        return IntPolynomial(self._coefficients)

    def __call__(self, x):
        result = 0
        for coefficient in reversed(self._coefficients):
            result = result * x + coefficient
        return result

    def _result_type(self, other):
        if isinstance(self, RatPolynomial) or isinstance(other, RatPolynomial):
            return RatPolynomial
        return IntPolynomial

    def __add__(self, other: IntPolynomial) -> IntPolynomial:
        size = max(len(self._coefficients), len(other.coefficients))
        left = list(self._coefficients) + [0] * (size - len(self._coefficients))
        right = list(other.coefficients) + [0] * (size - len(other.coefficients))
        return self._result_type(other)([x + y for x, y in zip(left, right)])

    def __neg__(self) -> IntPolynomial:
        return type(self)([-c for c in self._coefficients])

    def __sub__(self, other: IntPolynomial) -> IntPolynomial:
        return self + (-other)

    def __mul__(self, other: IntPolynomial) -> IntPolynomial:
        if self.is_zero or other.is_zero:
            return self._result_type(other)([])
        product = [0] * (len(self._coefficients) + len(other.coefficients) - 1)
        for i, x in enumerate(self._coefficients):
            for j, y in enumerate(other.coefficients):
                product[i + j] += x * y
        return self._result_type(other)(product)

    def __divmod__(self, other: IntPolynomial) -> Tuple[RatPolynomial, RatPolynomial]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        remainder = [Fraction(c) for c in self._coefficients]
        divisor = [Fraction(c) for c in other.coefficients]
        quotient = [Fraction(0)] * max(len(remainder) - len(divisor) + 1, 0)
        for shift in range(len(quotient) - 1, -1, -1):
            factor = remainder[shift + len(divisor) - 1] / divisor[-1]
            quotient[shift] = factor
            for i, d in enumerate(divisor):
                remainder[shift + i] -= factor * d
        return RatPolynomial(quotient), RatPolynomial(remainder)

    def __mod__(self, other: IntPolynomial) -> RatPolynomial:
        return divmod(self, other)[1]

    def exact_div(self, other: IntPolynomial) -> IntPolynomial:
        """Division that must leave no remainder; keeps the receiver's type."""
        quotient, remainder = divmod(self, other)
        if not remainder.is_zero:
            raise DomainError(f"{other} does not divide {self}")
        return type(self)(quotient.coefficients)

    def monic(self) -> RatPolynomial:
        if self.is_zero:
            raise DomainError("the zero polynomial has no monic form")
        lead = Fraction(self.leading)
        return RatPolynomial([Fraction(c) / lead for c in self._coefficients])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return tuple(map(Fraction, self._coefficients)) == tuple(map(Fraction, other.coefficients))

    def __hash__(self) -> int:
        return hash(tuple(map(Fraction, self._coefficients)))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({list(map(str, self._coefficients))})"

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for power in range(self.degree, -1, -1):
            coefficient = Fraction(self._coefficients[power])
            if coefficient == 0:
                continue
            sign = "-" if coefficient < 0 else "+"
            magnitude = abs(coefficient)
            if power == 0:
                body = str(magnitude)
            else:
                monomial = "x" if power == 1 else f"x^{power}"
                body = monomial if magnitude == 1 else f"{magnitude}*{monomial}"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


class RatPolynomial(IntPolynomial):
    """Polynomial with rational coefficients; minimal polynomials are stored monic."""

    @staticmethod
    def _coerce(value):
        return Fraction(value)


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> IntPolynomial:
    """
    The n-th cyclotomic polynomial.

    Computed by dividing x^n - 1 exactly by the cyclotomic polynomials of
    every proper divisor of n.
    """
    if n < 1:
        raise DomainError(f"cyclotomic index must be positive, got {n}")
    polynomial = IntPolynomial.unity(n)
    for d in divisors(n)[:-1]:
        polynomial = polynomial.exact_div(cyclotomic(d))
    return polynomial


def factor_unity(q: int) -> List[Tuple[int, IntPolynomial]]:
    """Factor x^q - 1 as the product of cyclotomic polynomials over d | q."""
    if q < 1:
        raise DomainError(f"q must be positive, got {q}")
    return [(d, cyclotomic(d)) for d in divisors(q)]


def _integer_scaled(p: RatPolynomial) -> Tuple[IntPolynomial, int]:
    """
    Substitute x -> x/L in a monic rational polynomial so it becomes a
    monic integer polynomial; returns the scaled polynomial and L.
    """
    scale = math.lcm(*(Fraction(c).denominator for c in p.coefficients))
    degree = p.degree
    scaled = [Fraction(c) * scale ** (degree - k) for k, c in enumerate(p.coefficients)]
    return IntPolynomial(scaled), scale


def _unscaled(q: IntPolynomial, scale: int) -> RatPolynomial:
    degree = q.degree
    return RatPolynomial([Fraction(c, scale ** (degree - k)) for k, c in enumerate(q.coefficients)])


def _integer_roots(p: IntPolynomial) -> List[int]:
    constant = p.coefficients[0]
    if constant == 0:
        return [0]
    candidates = divisors(abs(constant))
    return [r for s in candidates for r in (s, -s) if p(r) == 0]


def irreducible_factors(p: RatPolynomial) -> List[RatPolynomial]:
    """
    Factor a monic rational polynomial of degree at most four over Q.

    Linear factors come from the rational root theorem. Quadratic factors of
    a root-free quartic are found by pairing its numerical roots, rounding
    the pair's symmetric functions to integers (Gauss's lemma) and checking
    the candidate by exact division.
    """
    p = p.monic()
    if p.degree > 4:
        raise DomainError("factorization is limited to degree four")
    if p.degree <= 1:
        return [p]
    scaled, scale = _integer_scaled(p)
    roots = _integer_roots(scaled)
    if roots:
        linear = IntPolynomial([-roots[0], 1])
        rest = scaled.exact_div(linear)
        factors = [_unscaled(linear, scale)]
        return factors + irreducible_factors(_unscaled(rest, scale))
    if scaled.degree < 4:
        return [p]
    numeric = np.roots([float(c) for c in reversed(scaled.coefficients)])
    for first in combinations(range(4), 2):
        i, j = first
        total = numeric[i] + numeric[j]
        product = numeric[i] * numeric[j]
        if abs(total.imag) > 1e-6 or abs(product.imag) > 1e-6:
            continue
        candidate = IntPolynomial([round(product.real), -round(total.real), 1])
        if (scaled % candidate).is_zero:
            cofactor = scaled.exact_div(candidate)
            return [_unscaled(candidate, scale), _unscaled(cofactor, scale)]
    return [p]


def min_poly_unit_complex(cos_alpha: Scalar) -> RatPolynomial:
    """
    Minimal polynomial over Q of e^{i*alpha}, given cos(alpha) exactly.

    Args:
        cos_alpha: A + B*sqrt(C) with |cos_alpha| <= 1

    Returns:
        RatPolynomial: monic and irreducible, vanishing at e^{i*alpha}
    """
    cos_alpha = QuadSurd.coerce(cos_alpha)
    if abs(cos_alpha) > 1:
        raise DomainError(f"|cos| exceeds one: {cos_alpha}")
    a, b, c = cos_alpha.a, cos_alpha.b, cos_alpha.c
    if b == 0:
        if a == 1:
            return RatPolynomial([-1, 1])
        if a == -1:
            return RatPolynomial([1, 1])
        # no real roots, hence irreducible
        return RatPolynomial([1, -2 * a, 1])
    # product of the two conjugate quadratics x^2 - 2(a +- b*sqrt(c))x + 1
    quartic = RatPolynomial([1, -4 * a, 4 * a * a + 2 - 4 * b * b * c, -4 * a, 1])
    factors = irreducible_factors(quartic)
    if len(factors) == 1:
        return quartic
    value = float(cos_alpha)
    point = complex(value, math.sqrt(max(0.0, 1.0 - value * value)))
    logger.debug("quartic for cos=%s splits into %d factors", cos_alpha, len(factors))
    return min(factors, key=lambda f: abs(f(point)))


@lru_cache(maxsize=None)
def _totient(n: int) -> int:
    return int(totient(n))


def is_cyclotomic(p: IntPolynomial) -> Optional[int]:
    """
    Return n when p equals the n-th cyclotomic polynomial, else None.

    Every n with totient(n) = d satisfies n <= 2*d^2 because
    totient(n) >= sqrt(n/2), so the search below is exhaustive.
    """
    if p.is_zero or not p.is_monic:
        raise DomainError(f"expected a monic polynomial, got {p}")
    if not p.has_integer_coefficients:
        return None
    degree = p.degree
    if degree < 1:
        return None
    for n in range(1, 2 * degree * degree + 3):
        if _totient(n) == degree and cyclotomic(n) == p:
            return n
    return None
