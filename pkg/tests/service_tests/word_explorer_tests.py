import json
import math
import os

import numpy as np
import pytest

from services.angles import AngleSpec
from services.errors import BudgetError, DimensionError, DomainError, PreconditionError
from services.matrices import RotationMatrix, planar_rotation
from services.perm_orbit import trivial_action_generators
from services.so3_kernel import exp_skew
from services.word_explorer import (
    Word,
    beamsplitter_generators,
    covering_estimate,
    enumerate_words,
    exponent_alphabet,
    haar_samples,
    identity_word_search,
    has_nonidentity_shape,
    projected_word_count,
)


def orthogonal_pair(literal):
    """O12(theta) and O23(theta) in three modes: rotations about orthogonal axes."""
    spec = AngleSpec.parse(literal)
    return [planar_rotation(3, k, l, spec.radians, spec.cos_exact, spec.sin_exact) for k, l in ((0, 1), (1, 2))]


class TestWord:
    """Reduced words over generator indices."""

    def test_rejects_unreduced_letters(self):
        with pytest.raises(DomainError):
            Word(((0, 1), (0, 2)))
        with pytest.raises(DomainError):
            Word(((0, 0),))

    def test_reduce_merges_and_cancels(self):
        assert Word.reduce([(0, 1), (1, 1), (1, -1), (0, -1)]) == Word()
        assert Word.reduce([(0, 2), (0, 1), (1, 1)]) == Word(((0, 3), (1, 1)))

    def test_reduce_modulo_declared_order(self):
        assert Word.reduce([(0, 2), (0, 3)], orders=[5]) == Word()
        assert Word.reduce([(0, 4), (0, 3)], orders=[5]) == Word(((0, 2),))

    def test_text(self):
        assert str(Word(((0, 2), (1, -1)))) == "A^2 B^-1"
        assert str(Word(((0, 1),))) == "A"
        assert str(Word()) == "I"

    def test_inverse_and_product(self):
        word = Word(((0, 2), (1, -1)))
        assert word.inverse() == Word(((1, 1), (0, -2)))
        assert word * word.inverse() == Word()
        assert len(word * word) == 4

    def test_evaluate(self):
        A, B = orthogonal_pair("0.3")
        word = Word(((0, 1), (1, -2)))
        expected = A.entries @ np.linalg.matrix_power(B.entries.T, 2)
        assert np.allclose(word.evaluate([A, B]).entries, expected)
        assert Word().evaluate([A, B]).is_identity()

    def test_evaluate_unknown_generator(self):
        with pytest.raises(IndexError):
            Word(((2, 1),)).evaluate(orthogonal_pair("0.3"))

    def test_to_list(self):
        assert Word(((0, 2), (1, -1))).to_list() == [[0, 2], [1, -1]]


class TestAlphabet:
    """Allowed exponents and exact word counts."""

    def test_declared_and_free_generators(self):
        assert exponent_alphabet([5, None], 2, max_exponent=2) == [[1, 2, 3, 4], [1, -1, 2, -2]]

    def test_order_count_mismatch(self):
        with pytest.raises(DimensionError):
            exponent_alphabet([5], 2)

    def test_invalid_bounds(self):
        with pytest.raises(DomainError):
            exponent_alphabet(None, 2, max_exponent=0)
        with pytest.raises(DomainError):
            exponent_alphabet([0], 1)

    def test_projected_counts(self):
        assert projected_word_count([[1, 2, 3, 4]], 3) == 4
        assert projected_word_count([[1, -1], [1, -1]], 2) == 12
        assert projected_word_count([[1, 2, 3, 4], [1, 2, 3, 4]], 8) == 174760


class TestEnumerateWords:
    """Breadth-first enumeration in complete length shells."""

    def test_single_generator_of_order_five(self):
        A = planar_rotation(2, 0, 1, 2 * math.pi / 5)
        words = [word for word, _ in enumerate_words([A], 1, orders=[5])]
        assert [str(w) for w in words] == ["A", "A^2", "A^3", "A^4"]

    def test_two_free_generators(self):
        results = list(enumerate_words(orthogonal_pair("0.3"), 2))
        words = [word for word, _ in results]
        assert len(words) == 12
        assert len(set(words)) == 12
        assert [len(w) for w in words] == sorted(len(w) for w in words)

    def test_matrices_match_words(self):
        generators = orthogonal_pair("0.3")
        for word, matrix in enumerate_words(generators, 3, max_exponent=2):
            assert np.allclose(matrix.entries, word.evaluate(generators).entries)

    def test_exact_generators_stay_exact(self):
        results = list(enumerate_words(orthogonal_pair("π/2"), 2, orders=[4, 4]))
        assert all(matrix.is_exact for _, matrix in results)
        assert len(results) == 6 + 18

    def test_budget_exceeded(self):
        with pytest.raises(BudgetError):
            list(enumerate_words(orthogonal_pair("0.3"), 2, budget=10))

    def test_input_checks(self):
        with pytest.raises(PreconditionError):
            list(enumerate_words([], 2))
        with pytest.raises(DomainError):
            list(enumerate_words(orthogonal_pair("0.3"), 0))
        with pytest.raises(DimensionError):
            list(enumerate_words([RotationMatrix.identity(2), RotationMatrix.identity(3)], 1))


class TestIdentitySearch:
    """Shortest relations among the generators."""

    def test_two_fifths_pair_has_no_short_relation(self):
        """Orders (5, 5) about orthogonal axes: no identity word up to length 8."""
        assert identity_word_search(orthogonal_pair("2π/5"), 8, orders=[5, 5]) is None

    def test_quarter_turn_pair_relation(self):
        """Quarter turns about orthogonal axes satisfy a relation of length 4."""
        generators = orthogonal_pair("π/2")
        assert all(g.is_exact for g in generators)
        word = identity_word_search(generators, 6, orders=[4, 4])
        assert word is not None
        assert len(word) == 4
        assert word.evaluate(generators).is_identity()

    def test_single_quarter_turn(self):
        A = planar_rotation(2, 0, 1, math.pi / 2)
        assert identity_word_search([A], 4) == Word(((0, 4),))

    def test_block_rotation_of_order_fifteen(self):
        """O12(2pi/5) O34(2pi/3) has order fifteen."""
        C = planar_rotation(4, 0, 1, 2 * math.pi / 5) @ planar_rotation(4, 2, 3, 2 * math.pi / 3)
        assert identity_word_search([C], 15) == Word(((0, 15),))
        assert identity_word_search([C], 14) is None

    def test_generic_pair_has_no_relation(self):
        assert identity_word_search(orthogonal_pair("1.0"), 4, max_exponent=2) is None


class TestSampling:
    """Haar samples and covering estimates."""

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_samples_are_rotations(self, n):
        samples = haar_samples(n, 20, seed=7)
        assert samples.shape == (20, n, n)
        for sample in samples:
            assert np.allclose(sample.T @ sample, np.eye(n), atol=1e-10)
            assert np.linalg.det(sample) == pytest.approx(1.0)

    def test_samples_are_seeded(self):
        assert np.array_equal(haar_samples(3, 5, seed=1), haar_samples(3, 5, seed=1))
        assert not np.array_equal(haar_samples(3, 5, seed=1), haar_samples(3, 5, seed=2))

    def test_invalid_sample_requests(self):
        with pytest.raises(DomainError):
            haar_samples(3, 0, seed=1)
        with pytest.raises(DimensionError):
            haar_samples(1, 5, seed=1)

    def test_covering_estimate_is_deterministic(self):
        generators = orthogonal_pair("2π/5")
        first = covering_estimate(generators, 3, 200, seed=11, orders=[5, 5])
        second = covering_estimate(generators, 3, 200, seed=11, orders=[5, 5])
        assert first.to_dict() == second.to_dict()
        assert sum(first.histogram) == 200
        assert len(first.bin_edges) == len(first.histogram) + 1
        assert first.word_count == projected_word_count([[1, 2, 3, 4]] * 2, 3)

    def test_covering_radius_shrinks_with_length(self):
        generators = orthogonal_pair("2π/5")
        radii = [covering_estimate(generators, length, 300, seed=3, orders=[5, 5]).covering_radius
                 for length in (1, 2, 3, 4)]
        assert all(later <= earlier for earlier, later in zip(radii, radii[1:]))
        assert 0.0 < radii[-1] <= math.pi

    def test_covering_in_four_modes(self):
        generators = beamsplitter_generators(4, 2 * math.pi / 5)
        assert len(generators) == 6
        report = covering_estimate(generators, 1, 50, seed=5)
        assert report.word_count == 12
        assert report.sample_count == 50
        assert "distances" not in report.to_dict()


class TestNonidentityShape:
    """Words that cannot be the identity for orthogonal finite-order rotations."""

    def test_word_with_no_half_or_quarter_turns(self):
        assert has_nonidentity_shape(Word(((0, 1), (1, 2), (0, 3))), [5, 5])

    def test_half_turn_exponent(self):
        assert not has_nonidentity_shape(Word(((0, 2), (1, 1))), [4, 5])

    def test_consecutive_quarter_turns(self):
        assert not has_nonidentity_shape(Word(((0, 1), (1, 3))), [4, 4])
        assert has_nonidentity_shape(Word(((0, 1), (1, 1))), [4, 8])

    def test_trivial_cases(self):
        assert not has_nonidentity_shape(Word(), [5, 5])
        assert not has_nonidentity_shape(Word(((2, 1),)), [5, 5])

    def test_needs_two_finite_orders(self):
        with pytest.raises(PreconditionError):
            has_nonidentity_shape(Word(((0, 1),)), [5])
        with pytest.raises(PreconditionError):
            has_nonidentity_shape(Word(((0, 1),)), [5, None])


SWEEP_LENGTHS = (4, 6, 8, 10)
BASELINE_PATH = os.path.join(os.path.dirname(__file__), 'coverage_baseline.json')


def trivial_pair():
    """exp of the trivial generator on modes 1-3 and 2-4, rotated by 2pi/5 (order 5)."""
    generators = trivial_action_generators(4)
    return [exp_skew(A.scaled(2 * math.pi / 5 / A.norm())) for A in (generators[(0, 1, 2)], generators[(1, 2, 3)])]


@pytest.mark.slow
class TestCoverageSweep:
    """Covering radius over 1000 seeded samples at lengths 4, 6, 8 and 10."""

    @pytest.fixture(scope="class")
    def pair_radii(self):
        generators = orthogonal_pair("2π/5")
        return [covering_estimate(generators, length, 1000, seed=2024, orders=[5, 5]).covering_radius
                for length in SWEEP_LENGTHS]

    def test_radius_never_grows(self, pair_radii):
        assert all(later <= earlier for earlier, later in zip(pair_radii, pair_radii[1:]))
        assert 0.0 < pair_radii[-1] < pair_radii[0]

    def test_longest_radius_matches_baseline(self, pair_radii):
        """The max_len = 10 radius is recorded on the first run and compared afterwards."""
        if not os.path.exists(BASELINE_PATH):
            with open(BASELINE_PATH, 'w', encoding='utf-8') as handle:
                json.dump({'orthogonal_pair_2pi_5_len_10': pair_radii[-1]}, handle, indent=2)
        with open(BASELINE_PATH, encoding='utf-8') as handle:
            baseline = json.load(handle)
        assert pair_radii[-1] == pytest.approx(baseline['orthogonal_pair_2pi_5_len_10'], rel=1e-9)

    def test_trivial_action_words_stay_away(self):
        """
        Both rotations fix (1, 1, 1, 1), so a sample moving that vector by an
        angle b is at least b from every word; over 1000 samples some b
        exceeds pi/2.
        """
        generators = trivial_pair()
        for length in SWEEP_LENGTHS:
            report = covering_estimate(generators, length, 1000, seed=2024, orders=[5, 5])
            assert report.covering_radius > math.pi / 2, length
