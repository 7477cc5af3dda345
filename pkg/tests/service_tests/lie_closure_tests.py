import math

import numpy as np
import pytest

from services.errors import BranchError, DimensionError, DomainError
from services.lie_closure import (
    bch_basis_matrix_so3,
    bch_determinant_closed_form,
    bch_determinant_factor,
    bch_determinant_zeros,
    bch_factor_tan_roots,
    bracket_determinant,
    build_generating_set,
    closure,
    commutator,
    generating_set_basis_matrix,
    identify_so3_xyz,
    is_abelian,
    is_full,
    is_semisimple,
    label_text,
    p_block_determinant,
    p_block_matrix,
)
from services.matrices import algebra_dimension, basis_element, standard_basis
from services.perm_orbit import trivial_action_generators


def away_from(theta, points, margin=1e-3):
    return all(abs(theta - point) >= margin for point in points)


def random_angles(seed, count, points):
    """Seeded angles in (0, 2pi) outside the given neighborhoods."""
    rng = np.random.default_rng(seed)
    angles = []
    while len(angles) < count:
        theta = float(rng.uniform(0.0, 2 * math.pi))
        if away_from(theta, (0.0, 2 * math.pi, *points)):
            angles.append(theta)
    return angles


def test_commutator_of_basis_elements():
    """[E12, E23] = E13 and [E12, E13] = -E23."""
    assert np.array_equal(commutator(basis_element(3, 0, 1), basis_element(3, 1, 2)).exact,
                          basis_element(3, 0, 2).exact)
    assert np.array_equal(commutator(basis_element(3, 0, 1), basis_element(3, 0, 2)).exact,
                          (-basis_element(3, 1, 2)).exact)


def test_commutator_rejects_mixed_sizes():
    with pytest.raises(DimensionError):
        commutator(basis_element(3, 0, 1), basis_element(4, 0, 1))


class TestClosure:
    """Fixed-point closure under commutators."""

    def test_two_planar_generators_span_so3(self):
        span = closure([basis_element(3, 0, 1), basis_element(3, 1, 2)])
        assert span.dim == 3
        assert is_full(span)
        assert span.is_exact

    def test_standard_basis_is_full_in_float(self):
        generators = [g.drop_exact().scaled(0.37) for g in standard_basis(5)]
        span = closure(generators)
        assert span.dim == algebra_dimension(5)
        assert not span.is_exact

    def test_single_generator_is_abelian(self):
        span = closure([basis_element(4, 0, 1)])
        assert span.dim == 1
        assert is_abelian(span)
        assert not is_semisimple(span)

    def test_commuting_planes(self):
        span = closure([basis_element(4, 0, 1), basis_element(4, 2, 3)])
        assert span.dim == 2
        assert is_abelian(span)

    def test_trivial_action_closure_in_so4(self):
        """The four embeddings of E12 - E13 + E23 close on a copy of so(3)."""
        span = closure(list(trivial_action_generators(4).values()))
        assert span.dim == 3
        assert span.is_exact
        assert len(span.exact_basis) == 3
        assert all(element.is_exact for element in span.exact_basis)
        assert is_semisimple(span)
        assert not is_abelian(span)
        triple = identify_so3_xyz(span)
        assert triple is not None

    def test_so3_triple_brackets(self):
        span = closure(standard_basis(3))
        X, Y, Z = identify_so3_xyz(span)
        assert np.allclose(commutator(X, Y).entries, Z.entries)
        assert np.allclose(commutator(Z, X).entries, Y.entries)
        assert np.allclose(commutator(Y, Z).entries, X.entries)

    def test_identify_needs_three_dimensions(self):
        assert identify_so3_xyz(closure([basis_element(3, 0, 1)])) is None

    def test_span_membership(self):
        span = closure([basis_element(4, 0, 1), basis_element(4, 1, 2)])
        assert span.contains(basis_element(4, 0, 2))
        assert not span.contains(basis_element(4, 2, 3))

    def test_empty_generator_list(self):
        with pytest.raises(DimensionError):
            closure([])


def test_bracket_determinant_detects_dependence():
    """Both expressions equal -1 for E12, E13 and vanish for parallel generators."""
    det, minors = bracket_determinant(basis_element(3, 0, 1), basis_element(3, 0, 2))
    assert det == pytest.approx(-1.0)
    assert minors == pytest.approx(-1.0)
    X = basis_element(3, 0, 1).scaled(0.5)
    det, minors = bracket_determinant(X, X.scaled(2.0))
    assert det == pytest.approx(0.0)
    assert minors == pytest.approx(0.0)


class TestThreeModeBasisChange:
    """Change of basis from (E12, E13, E23) to logarithms of the products."""

    @pytest.mark.parametrize("theta", [0.5, 1.0, 2 * math.pi / 5])
    def test_determinant_matches_closed_form(self, theta):
        report = bch_basis_matrix_so3(theta)
        assert report.determinant == pytest.approx(report.closed_form, rel=1e-9)
        assert report.columns == ("O12O13", "O12O23", "O13O23")

    def test_determinant_on_fine_grid(self):
        """1000 angles over (0, 2pi), away from the zeros at pi and 3pi/2."""
        mismatches = []
        for theta in np.linspace(0.0, 2 * math.pi, 1002)[1:-1]:
            if away_from(theta, (math.pi, 3 * math.pi / 2)):
                report = bch_basis_matrix_so3(float(theta))
                if report.determinant != pytest.approx(report.closed_form, rel=1e-8, abs=1e-10):
                    mismatches.append(float(theta))
        assert mismatches == []

    def test_angle_outside_range(self):
        with pytest.raises(DomainError):
            bch_basis_matrix_so3(0.0)

    def test_factor_zeros(self):
        """The determinant vanishes on (0, 2pi) only at pi and 3pi/2."""
        zeros = bch_determinant_zeros()
        assert zeros == pytest.approx([math.pi, 3 * math.pi / 2], abs=1e-9)
        assert bch_determinant_factor(3 * math.pi / 2) == pytest.approx(0.0, abs=1e-12)

    def test_factor_roots_in_tangent_quarter_angle(self):
        assert bch_factor_tan_roots() == pytest.approx([1 - math.sqrt(2), 1 + math.sqrt(2)])

    def test_closed_form_is_nonzero_at_rational_angles(self):
        for theta in (2 * math.pi / 5, math.pi / 3, 2 * math.pi / 3):
            assert abs(bch_determinant_closed_form(theta)) > 1e-6


class TestGeneratingSet:
    """The recursive product generating set S^(N)."""

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_size_matches_algebra_dimension(self, n):
        assert len(build_generating_set(n, 0.4)) == algebra_dimension(n)

    def test_three_mode_labels(self):
        labels = [label_text(label) for label, _ in build_generating_set(3, 0.4)]
        assert labels == ["O12O13", "O12O23", "O13O23"]

    def test_four_mode_set_adds_products_on_mode_one(self):
        labels = [label_text(label) for label, _ in build_generating_set(4, 0.4)]
        assert labels == ["O23O24", "O23O34", "O24O34", "O12O23", "O12O24", "O13O23"]

    def test_needs_three_modes(self):
        with pytest.raises(DomainError):
            build_generating_set(2, 0.4)

    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_p_block_determinant(self, n):
        """det P = -(sin/2)^(N-3) (sin^2/4 + cos^4(theta/2))."""
        theta = 2 * math.pi / 5
        assert np.linalg.det(p_block_matrix(n, theta)) == pytest.approx(p_block_determinant(n, theta))

    def test_p_block_at_quarter_turn(self):
        assert p_block_determinant(4, math.pi / 2) == pytest.approx(-0.25)

    def test_p_block_needs_four_modes(self):
        with pytest.raises(DomainError):
            p_block_matrix(3, 0.4)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_full_basis_change_matches_closed_form(self, n):
        report = generating_set_basis_matrix(n, 2 * math.pi / 5, principal=False)
        assert report.matrix.shape == (algebra_dimension(n), algebra_dimension(n))
        assert report.determinant == pytest.approx(report.closed_form, rel=1e-8)
        assert abs(report.determinant) > 1e-6

    def test_half_turn_products_have_no_logarithm(self):
        with pytest.raises(BranchError):
            generating_set_basis_matrix(3, math.pi, principal=False)

    @pytest.mark.parametrize("n", [4, 5, 6, 7, 8, 9, 10])
    def test_full_basis_change_on_random_angles(self, n):
        """100 seeded angles per size, away from 0, pi and 3pi/2."""
        mismatches = []
        for theta in random_angles(n, 100, (math.pi, 3 * math.pi / 2)):
            report = generating_set_basis_matrix(n, theta, principal=False)
            if report.determinant != pytest.approx(report.closed_form, rel=1e-7):
                mismatches.append(theta)
        assert mismatches == []

    def test_each_added_mode_multiplies_by_the_p_block(self):
        """det S^(N) / det S^(N-1) follows the P block closed form for N = 4..10."""
        for theta in random_angles(2024, 100, (math.pi, 3 * math.pi / 2)):
            reports = {n: generating_set_basis_matrix(n, theta, principal=False) for n in range(3, 11)}
            for n in range(4, 11):
                numeric = reports[n].determinant / reports[n - 1].determinant
                expected = reports[n].closed_form / reports[n - 1].closed_form
                assert numeric == pytest.approx(expected, rel=1e-7), (n, theta)

    @pytest.mark.parametrize("n", [4, 7, 10])
    def test_p_block_vanishes_only_at_zero_and_half_turn(self, n):
        assert p_block_determinant(n, 0.0) == pytest.approx(0.0, abs=1e-15)
        assert p_block_determinant(n, math.pi) == pytest.approx(0.0, abs=1e-15)
        for theta in random_angles(n, 100, (math.pi,)):
            assert p_block_determinant(n, theta) != 0.0
