"""
Data files module for the beamsplitter universality tool.
Handles matrix documents, the geodetic exception table and the output schema.
"""

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, List, Optional, Tuple, Union

import numpy as np

from services.errors import BeamsplitterError, DomainError
from services.exact_scalar import QuadSurd
from services.matrices import RotationMatrix, SkewMatrix, exact_array, exact_determinant

# Data file locations
DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data')
DEFAULT_GEODETIC_TABLE = os.path.join(DATA_DIR, 'geodetic_exceptions.txt')
DEFAULT_SCHEMA = os.path.join(DATA_DIR, 'documents.schema.json')

MODES = ('exact', 'float')


class MatrixParseError(BeamsplitterError, ValueError):
    """A matrix document could not be parsed; carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class MatrixDocument:
    """A parsed matrix file: declared size, arithmetic mode and raw tokens."""

    modes: int
    mode: str
    rows: Tuple[Tuple[Token, ...], ...]

    def values(self, mode: Optional[str] = None) -> list:
        """Entries as QuadSurd (exact) or float, converting every token."""
        mode = mode or self.mode
        if mode not in MODES:
            raise DomainError(f"unknown mode {mode!r}")
        return [[_scalar(token, mode) for token in row] for row in self.rows]

    def to_rotation(self, mode: Optional[str] = None) -> RotationMatrix:
        """
        Raises:
            DomainError: when the matrix is not orthogonal, or has determinant -1
        """
        values = self.values(mode)
        if (mode or self.mode) == 'exact':
            exact = exact_array(values)
            if exact_determinant(exact) == -1:
                raise DomainError(_NEGATIVE_DETERMINANT)
            return RotationMatrix(None, exact)
        entries = np.array(values, dtype=float)
        if np.linalg.det(entries) < 0:
            raise DomainError(_NEGATIVE_DETERMINANT)
        return RotationMatrix(entries)

    def to_generator(self, mode: Optional[str] = None) -> SkewMatrix:
        values = self.values(mode)
        if (mode or self.mode) == 'exact':
            return SkewMatrix(None, exact_array(values))
        return SkewMatrix(np.array(values, dtype=float))


_NEGATIVE_DETERMINANT = ("determinant is -1: beamsplitters are taken with determinant equal to one; "
                         "flip the sign of one mode to convert")


def _scalar(token: Token, mode: str) -> Union[QuadSurd, float]:
    try:
        if mode == 'exact':
            return QuadSurd.parse(token.text)
        try:
            return float(token.text)
        except ValueError:
            return float(QuadSurd.parse(token.text))
    except ValueError:
        raise MatrixParseError(f"not a {mode} scalar: {token.text!r}", token.line, token.column) from None


def _split_row(text: str, line: int) -> Tuple[Token, ...]:
    tokens = []
    start = 0
    for piece in text.split(','):
        stripped = piece.strip()
        column = start + (len(piece) - len(piece.lstrip())) + 1
        if not stripped:
            raise MatrixParseError("empty entry", line, column)
        tokens.append(Token(stripped, line, column))
        start += len(piece) + 1
    return tuple(tokens)


def parse_matrix_document(text: str) -> MatrixDocument:
    """
    Parse a matrix document.

    Format: '#' starts a comment; header lines 'modes = m' and
    'mode = exact|float' (default exact) precede m rows of comma-separated
    scalar literals.

    Raises:
        MatrixParseError: with the line and column of the first problem
    """
    modes = None
    mode = 'exact'
    rows: List[Tuple[Token, ...]] = []
    last_line = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        last_line = number
        content = raw.split('#', 1)[0].rstrip()
        if not content.strip():
            continue
        if '=' in content:
            if rows:
                raise MatrixParseError("header line after matrix rows", number, content.index('=') + 1)
            key, _, value = content.partition('=')
            key, value = key.strip().lower(), value.strip()
            column = raw.index(value) + 1 if value else len(content) + 1
            if key == 'modes':
                if not value.isdigit() or int(value) < 2:
                    raise MatrixParseError(f"modes must be an integer of at least 2, got {value!r}", number, column)
                modes = int(value)
            elif key == 'mode':
                if value.lower() not in MODES:
                    raise MatrixParseError(f"mode must be exact or float, got {value!r}", number, column)
                mode = value.lower()
            else:
                raise MatrixParseError(f"unknown header {key!r}", number, 1)
            continue
        row = _split_row(content, number)
        if modes is None:
            modes = len(row)
        if len(row) != modes:
            column = row[modes].column if len(row) > modes else len(content) + 1
            raise MatrixParseError(f"expected {modes} entries, found {len(row)}", number, column)
        if len(rows) == modes:
            raise MatrixParseError(f"more than {modes} rows", number, 1)
        rows.append(row)
    if modes is None or len(rows) != modes:
        raise MatrixParseError(f"expected {modes or 'a square block of'} rows, found {len(rows)}", last_line + 1, 1)
    return MatrixDocument(modes, mode, tuple(rows))


def dump_matrix_document(matrix: Union[RotationMatrix, SkewMatrix], mode: Optional[str] = None) -> str:
    """Inverse of parse_matrix_document; exact entries are written in the scalar grammar."""
    if mode is None:
        mode = 'exact' if matrix.exact is not None else 'float'
    if mode == 'exact' and matrix.exact is None:
        raise DomainError("matrix has no exact entries to write")
    source = matrix.exact if mode == 'exact' else matrix.entries
    lines = [f"modes = {matrix.dimension}", f"mode = {mode}"]
    for row in source:
        lines.append(', '.join(str(x) if mode == 'exact' else repr(float(x)) for x in row))
    return '\n'.join(lines) + '\n'


def load_matrix_document(path: str) -> MatrixDocument:
    with open(path, encoding='utf-8') as handle:
        return parse_matrix_document(handle.read())


def validate_matrix_document(text: str, kind: str = 'rotation') -> Tuple[bool, str]:
    """
    Check that a document parses to a valid rotation or generator.

    Returns:
        tuple: (is_valid, message)
    """
    if kind not in ('rotation', 'generator'):
        return False, f"unknown matrix kind {kind!r}."
    try:
        document = parse_matrix_document(text)
        if kind == 'rotation':
            document.to_rotation()
        else:
            document.to_generator()
    except BeamsplitterError as exc:
        return False, str(exc)
    return True, f"Valid {document.modes}x{document.modes} {document.mode} {kind}."


def load_geodetic_table(path: str = DEFAULT_GEODETIC_TABLE) -> FrozenSet[Fraction]:
    """Reduced fractions, one per line, '#' comments allowed."""
    values = set()
    with open(path, encoding='utf-8') as handle:
        for number, raw in enumerate(handle, start=1):
            content = raw.split('#', 1)[0].strip()
            if not content:
                continue
            try:
                values.add(Fraction(content))
            except ValueError:
                raise MatrixParseError(f"not a fraction: {content!r}", number,
                                       raw.index(content) + 1) from None
    return frozenset(values)


def load_schema(path: str = DEFAULT_SCHEMA) -> dict:
    with open(path, encoding='utf-8') as handle:
        return json.load(handle)
