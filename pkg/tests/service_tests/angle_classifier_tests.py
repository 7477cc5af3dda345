import math
from fractions import Fraction

import pytest

from services.angle_classifier import (
    AngleClass,
    AngleKind,
    classify_exact,
    classify_numeric,
    degree_two_cosines,
    dense_in_one_param,
    primitive_order,
    rational_cosine,
    rotation_order,
    spectrum_angles,
)
from services.angles import AngleSpec
from services.errors import DomainError
from services.exact_scalar import QuadSurd
from services.matrices import RotationMatrix, planar_rotation

GOLDEN_COSINE = QuadSurd.parse("(-1/4 + 1/4*sqrt(5))")


class TestClassifyExact:
    """Exact classification through cyclotomic minimal polynomials."""

    @pytest.mark.parametrize("cosine, p, q", [
        (Fraction(1, 2), 1, 3),
        (0, 1, 2),
        (-1, 1, 1),
        (1, 0, 1),
        (GOLDEN_COSINE, 2, 5),
        (QuadSurd(0, Fraction(1, 2), 2), 1, 4),
        (QuadSurd(0, Fraction(1, 2), 3), 1, 6),
    ])
    def test_rational_multiples(self, cosine, p, q):
        result = classify_exact(cosine)
        assert result.kind is AngleKind.RATIONAL_PI
        assert (result.p, result.q) == (p, q)

    def test_one_third_is_irrational(self):
        result = classify_exact(Fraction(1, 3))
        assert result.is_irrational
        assert "not cyclotomic" in result.certificate

    def test_irrational_surd(self):
        assert classify_exact(QuadSurd(Fraction(1, 4), Fraction(1, 4), 2)).is_irrational

    def test_cosine_out_of_range(self):
        with pytest.raises(DomainError):
            classify_exact(Fraction(3, 2))


class TestClassifyNumeric:
    """Continued-fraction classification of floating angles."""

    def test_recovers_small_denominator(self):
        result = classify_numeric(2 * math.pi / 5)
        assert (result.p, result.q) == (2, 5)

    def test_negative_angle_wraps(self):
        result = classify_numeric(-math.pi / 2)
        assert (result.p, result.q) == (3, 2)

    def test_never_certifies_irrational(self):
        """One radian has no convergent close enough with q <= 10000."""
        result = classify_numeric(1.0)
        assert result.kind is AngleKind.UNKNOWN

    def test_denominator_cap(self):
        assert classify_numeric(2 * math.pi / 7, q_max=5).kind is AngleKind.UNKNOWN

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            classify_numeric(1.0, q_max=0)
        with pytest.raises(DomainError):
            classify_numeric(1.0, tol=0.0)


def test_exact_and_numeric_classifications_agree():
    """Every p*pi/q in [0, pi] with q <= 50, exactly wherever the cosine has degree at most two."""
    exact_checked = 0
    for q in range(1, 51):
        for p in range(0, q + 1):
            if math.gcd(p, q) != 1:
                continue
            numeric = classify_numeric(p * math.pi / q)
            assert numeric.kind is AngleKind.RATIONAL_PI, (p, q)
            assert (numeric.p, numeric.q) == (p, q)
            cosine = rational_cosine(p, q)
            if cosine is not None:
                exact = classify_exact(cosine)
                assert exact == AngleClass.rational(p, q, exact.certificate), (p, q)
                exact_checked += 1
    # 0, pi, pi/2, pi/3, 2pi/3 and the eight quadratic-surd angles
    assert exact_checked == 13


def test_angle_class_normalizes_mod_two():
    """Rational angles are stored with 0 <= p/q < 2."""
    assert AngleClass.rational(5, 2) == AngleClass.rational(1, 2)
    assert AngleClass.rational(-1, 3).p == 5
    assert AngleClass.rational(2, 5).radians == pytest.approx(2 * math.pi / 5)
    assert AngleClass.unknown().radians is None


def test_rational_cosine():
    """Exact cos(p pi/q) when its degree is at most two."""
    assert rational_cosine(1, 3) == Fraction(1, 2)
    assert rational_cosine(2, 5) == GOLDEN_COSINE
    assert rational_cosine(1, 5) == QuadSurd(Fraction(1, 4), Fraction(1, 4), 5)
    assert rational_cosine(3, 4) == QuadSurd(0, Fraction(-1, 2), 2)
    assert rational_cosine(1, 7) is None


def test_orders():
    assert primitive_order(1, 2) == 4
    assert primitive_order(2, 5) == 5
    assert rotation_order(AngleClass.rational(2, 5)) == 5
    assert rotation_order(AngleClass.irrational()) is None


def test_degree_two_table():
    """Eight angles in [0, pi] have a quadratic-surd cosine."""
    table = degree_two_cosines()
    assert [(a.p, a.q) for a in table] == [(1, 6), (1, 5), (1, 4), (2, 5), (3, 5), (3, 4), (4, 5), (5, 6)]
    two_fifths = next(a for a in table if (a.p, a.q) == (2, 5))
    assert two_fifths.cosine == GOLDEN_COSINE
    assert two_fifths.product_cosine == QuadSurd(Fraction(-9, 16), Fraction(3, 16), 5)
    assert two_fifths.product_class.is_irrational


class TestSpectrum:
    """Rotation angles and one-parameter density."""

    def test_spectrum_of_two_planes(self):
        R = planar_rotation(4, 0, 1, 0.3) @ planar_rotation(4, 2, 3, 1.1)
        spectrum = spectrum_angles(R)
        assert spectrum.angles == pytest.approx((0.3, 1.1))
        assert spectrum.plus_one_multiplicity == 0

    def test_spectrum_of_odd_dimension(self):
        spectrum = spectrum_angles(planar_rotation(5, 1, 3, 0.3))
        assert spectrum.angles == pytest.approx((0.0, 0.3), abs=1e-7)
        assert spectrum.plus_one_multiplicity == 3

    def test_identity_is_not_dense(self):
        result = dense_in_one_param(RotationMatrix.identity(3))
        assert result.dense is False

    def test_rational_rotation_is_not_dense(self):
        assert dense_in_one_param(planar_rotation(3, 0, 1, 2 * math.pi / 5)).dense is False

    def test_exact_irrational_rotation_is_dense(self):
        cos_value = QuadSurd(Fraction(1, 3))
        sin_value = QuadSurd(0, Fraction(2, 3), 2)
        R = planar_rotation(3, 0, 1, math.acos(1 / 3), cos_value, sin_value)
        assert R.is_exact
        assert dense_in_one_param(R).dense is True

    def test_float_rotation_is_undecided(self):
        assert dense_in_one_param(planar_rotation(3, 0, 1, 1.0)).dense is None


class TestAngleSpec:
    """Angle literals."""

    @pytest.mark.parametrize("literal", ["0.75π", "3pi/4", "3π/4", "0.75*pi"])
    def test_rational_forms(self, literal):
        spec = AngleSpec.parse(literal)
        assert spec.rational == (3, 4)
        assert spec.radians == pytest.approx(3 * math.pi / 4)
        assert spec.cos_exact == QuadSurd(0, Fraction(-1, 2), 2)
        assert spec.sin_exact == QuadSurd(0, Fraction(1, 2), 2)
        assert spec.is_exact
        assert spec.text == literal

    def test_negative_and_bare_pi(self):
        assert AngleSpec.parse("-π/2").rational == (3, 2)
        assert AngleSpec.parse("pi").rational == (1, 1)

    def test_two_fifths_has_no_exact_sine(self):
        spec = AngleSpec.parse("2π/5")
        assert spec.cos_exact == GOLDEN_COSINE
        assert spec.sin_exact is None
        assert not spec.is_exact

    def test_radians(self):
        spec = AngleSpec.parse("1.0")
        assert spec.radians == 1.0
        assert spec.rational is None
        assert spec.classify(10_000, 1e-9).kind is AngleKind.UNKNOWN

    def test_cosine_literal(self):
        spec = AngleSpec.parse("cos=1/3")
        assert spec.sin_exact == QuadSurd(0, Fraction(2, 3), 2)
        assert spec.cosine == pytest.approx(1 / 3)
        assert spec.classify(10_000, 1e-9).is_irrational

    @pytest.mark.parametrize("literal", ["banana", "cos=2", "cos=abc", "π/0", ""])
    def test_invalid_literals(self, literal):
        with pytest.raises(DomainError):
            AngleSpec.parse(literal)
