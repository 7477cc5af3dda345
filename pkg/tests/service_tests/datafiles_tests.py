import math
from fractions import Fraction

import numpy as np
import pytest

from datafiles import (
    MatrixParseError,
    dump_matrix_document,
    load_geodetic_table,
    load_matrix_document,
    load_schema,
    parse_matrix_document,
    validate_matrix_document,
)
from services.errors import DomainError
from services.exact_scalar import QuadSurd
from services.matrices import RotationMatrix, planar_rotation

QUARTER_TURN_X = """\
# O23(pi/2) on three modes
modes = 3
mode = exact
1, 0, 0
0, 0, -1   # trailing comment
0, 1, 0
"""

EIGHTH_TURN = """\
(1/2*sqrt(2)), (1/2*sqrt(2))
(-1/2*sqrt(2)), (1/2*sqrt(2))
"""


class TestParseMatrixDocument:
    """Matrix files: headers, comments and rows of scalar literals."""

    def test_headers_and_comments(self):
        document = parse_matrix_document(QUARTER_TURN_X)
        assert document.modes == 3
        assert document.mode == 'exact'
        assert [token.text for token in document.rows[1]] == ['0', '0', '-1']
        R = document.to_rotation()
        assert R.is_exact
        assert R.exact[2, 1] == 1

    def test_size_inferred_from_first_row(self):
        document = parse_matrix_document("0, 1\n-1, 0\n")
        assert document.modes == 2
        assert document.mode == 'exact'

    def test_surd_entries(self):
        R = parse_matrix_document(EIGHTH_TURN).to_rotation()
        assert R.exact[0, 0] == QuadSurd(0, Fraction(1, 2), 2)
        assert np.allclose(R.entries, planar_rotation(2, 0, 1, math.pi / 4).entries)

    def test_float_mode_accepts_surds(self):
        R = parse_matrix_document("mode = float\n" + EIGHTH_TURN).to_rotation()
        assert not R.is_exact
        assert R.entries[0, 0] == pytest.approx(math.sqrt(2) / 2)

    def test_mode_override(self):
        document = parse_matrix_document(QUARTER_TURN_X)
        assert not document.to_rotation('float').is_exact

    def test_generator(self):
        A = parse_matrix_document("0, 1, -1\n-1, 0, 1\n1, -1, 0\n").to_generator()
        assert A.is_exact
        assert A.exact[0, 1] == 1

    @pytest.mark.parametrize("text, line, column", [
        ("modes = 3\n1, 0\n", 2, 5),
        ("1,,0\n", 1, 3),
        ("1, 0\n0, 1\nmodes = 2\n", 3, 7),
        ("size = 2\n", 1, 1),
        ("mode = fuzzy\n1, 0\n0, 1\n", 1, 8),
        ("modes = 1\n", 1, 9),
        ("modes = 2\n1, 0\n0, 1\n1, 0\n", 4, 1),
        ("modes = 3\n1, 0, 0\n", 3, 1),
        ("", 1, 1),
    ])
    def test_errors_carry_position(self, text, line, column):
        with pytest.raises(MatrixParseError) as info:
            parse_matrix_document(text)
        assert info.value.line == line
        assert info.value.column == column
        assert str(info.value).startswith(f"line {line}, column {column}:")

    def test_bad_scalar_reported_on_conversion(self):
        document = parse_matrix_document("1, x\n0, 1\n")
        with pytest.raises(MatrixParseError) as info:
            document.to_rotation()
        assert (info.value.line, info.value.column) == (1, 4)

    @pytest.mark.parametrize("mode", ["exact", "float"])
    def test_reflection_rejected(self, mode):
        document = parse_matrix_document(f"mode = {mode}\n-1, 0\n0, 1\n")
        with pytest.raises(DomainError) as info:
            document.to_rotation()
        assert "flip the sign" in str(info.value)

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "o23.txt"
        path.write_text(QUARTER_TURN_X, encoding='utf-8')
        assert load_matrix_document(str(path)).modes == 3


class TestValidateMatrixDocument:

    def test_valid_rotation(self):
        assert validate_matrix_document(QUARTER_TURN_X) == (True, "Valid 3x3 exact rotation.")

    def test_valid_generator(self):
        assert validate_matrix_document("0, 1\n-1, 0\n", 'generator') == (True, "Valid 2x2 exact generator.")

    def test_not_orthogonal(self):
        valid, message = validate_matrix_document("1, 1\n0, 1\n")
        assert not valid
        assert "orthogonal" in message

    def test_not_skew(self):
        valid, _ = validate_matrix_document("1, 0\n0, 1\n", 'generator')
        assert not valid

    def test_unknown_kind(self):
        assert validate_matrix_document("0, 1\n-1, 0\n", 'tensor') == (False, "unknown matrix kind 'tensor'.")


class TestDumpMatrixDocument:

    def test_exact(self):
        text = dump_matrix_document(RotationMatrix.from_exact([[0, 1], [-1, 0]]))
        assert text == "modes = 2\nmode = exact\n0, 1\n-1, 0\n"

    def test_surds_parse_back(self):
        R = parse_matrix_document(EIGHTH_TURN).to_rotation()
        again = parse_matrix_document(dump_matrix_document(R)).to_rotation()
        assert np.array_equal(again.exact, R.exact)

    def test_float(self):
        R = planar_rotation(2, 0, 1, 0.3)
        document = parse_matrix_document(dump_matrix_document(R))
        assert document.mode == 'float'
        assert np.array_equal(document.to_rotation().entries, R.entries)

    def test_exact_requested_for_float_matrix(self):
        with pytest.raises(DomainError):
            dump_matrix_document(planar_rotation(2, 0, 1, 0.3), 'exact')


class TestGeodeticTable:

    def test_default_table(self):
        assert load_geodetic_table() == {Fraction(0), Fraction(1, 2), Fraction(1)}

    def test_custom_table(self, tmp_path):
        path = tmp_path / "table.txt"
        path.write_text("# custom\n8/9\n\n1/4  # comment\n", encoding='utf-8')
        assert load_geodetic_table(str(path)) == {Fraction(8, 9), Fraction(1, 4)}

    def test_bad_entry(self, tmp_path):
        path = tmp_path / "table.txt"
        path.write_text("1/2\n  two\n", encoding='utf-8')
        with pytest.raises(MatrixParseError) as info:
            load_geodetic_table(str(path))
        assert (info.value.line, info.value.column) == (2, 3)


def test_schema_lists_every_document_kind():
    schema = load_schema()
    kinds = schema["properties"]["document"]["enum"]
    assert len(schema["oneOf"]) == len(kinds)
    assert "verdict" in kinds
