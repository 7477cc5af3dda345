"""
Angles Module - Angle literals accepted by the command line and the engine.

Grammar: ``3π/4``, ``3pi/4``, ``0.4π``, ``pi``, ``-π/2``, plain radians such
as ``1.0``, or ``cos=EXPR`` with EXPR in the exact scalar grammar.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from services.angle_classifier import AngleClass, classify_exact, classify_numeric, rational_cosine
from services.errors import DomainError
from services.exact_scalar import QuadSurd

_PI_RE = re.compile(r"^\s*([+-]?)\s*(\d+(?:\.\d+)?)?\s*\*?\s*(?:π|pi)\s*(?:/\s*(\d+))?\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class AngleSpec:
    """
    An angle with whatever exact information its literal carried.

    ``rational`` is (p, q) with angle = p*pi/q reduced to [0, 2pi);
    ``cos_exact``/``sin_exact`` are set when they are quadratic surds.
    """

    radians: float
    cos_exact: Optional[QuadSurd] = None
    sin_exact: Optional[QuadSurd] = None
    rational: Optional[Tuple[int, int]] = None
    text: str = ""

    @classmethod
    def from_fraction(cls, p: int, q: int, text: str = "") -> AngleSpec:
        value = Fraction(p, q) % 2
        p, q = value.numerator, value.denominator
        cos_exact = rational_cosine(p, q)
        # sin(p pi/q) = cos((q - 2p) pi/(2q))
        sin_exact = rational_cosine(q - 2 * p, 2 * q)
        return cls(math.pi * p / q, cos_exact, sin_exact, (p, q), text or f"{p}π/{q}")

    @classmethod
    def from_cosine(cls, cos_theta: QuadSurd, text: str = "") -> AngleSpec:
        """Angle in [0, pi] with the given exact cosine."""
        cos_theta = QuadSurd.coerce(cos_theta)
        if abs(cos_theta) > 1:
            raise DomainError(f"|cos| exceeds one: {cos_theta}")
        sin_exact = (1 - cos_theta * cos_theta).sqrt()
        return cls(math.acos(float(cos_theta)), cos_theta, sin_exact, None, text or f"cos={cos_theta}")

    @classmethod
    def from_radians(cls, radians: float, text: str = "") -> AngleSpec:
        return cls(float(radians), None, None, None, text or repr(float(radians)))

    @classmethod
    def parse(cls, text: str) -> AngleSpec:
        """
        Raises:
            DomainError: if the literal matches no form of the grammar
        """
        literal = text.strip()
        if literal.lower().startswith("cos="):
            try:
                return cls.from_cosine(QuadSurd.parse(literal[4:]), literal)
            except ValueError as exc:
                if isinstance(exc, DomainError):
                    raise
                raise DomainError(f"invalid cosine in angle {text!r}: {exc}") from exc
        match = _PI_RE.match(literal)
        if match:
            sign, coefficient, denominator = match.groups()
            value = Fraction(coefficient) if coefficient else Fraction(1)
            if denominator:
                if int(denominator) == 0:
                    raise DomainError(f"zero denominator in angle {text!r}")
                value /= int(denominator)
            if sign == "-":
                value = -value
            return cls.from_fraction(value.numerator, value.denominator, literal)
        try:
            return cls.from_radians(float(literal), literal)
        except ValueError:
            raise DomainError(f"not an angle literal: {text!r}") from None

    @property
    def cosine(self) -> float:
        return float(self.cos_exact) if self.cos_exact is not None else math.cos(self.radians)

    @property
    def is_exact(self) -> bool:
        return self.cos_exact is not None and self.sin_exact is not None

    def classify(self, q_max: int, tol: float) -> AngleClass:
        """Exact classification when the literal allows it, numeric otherwise."""
        if self.rational is not None:
            p, q = self.rational
            return AngleClass.rational(p, q, f"angle given as {p}π/{q}")
        if self.cos_exact is not None:
            return classify_exact(self.cos_exact)
        return classify_numeric(self.radians, q_max, tol)
