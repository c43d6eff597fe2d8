"""
Text parser for matrices and vectors.

The format has a header line "m p" followed by m lines of p whitespace
separated decimal numbers. A vector is stored as an m x 1 matrix. Blank lines
and lines starting with '#' are ignored.
"""

import logging
import math
from pathlib import Path
from typing import List, Union

import numpy as np

from als.errors import DimensionError, ParseError
from als.models import DenseMatrix, Vector, as_matrix, as_vector
from als.parser.base import InputParser

logger = logging.getLogger(__name__)


class MatrixTextParser(InputParser):
    """Parser for the "m p" header text format."""

    valid_extensions = ('.txt', '.mat', '.vec', '.dat')

    def parse_file(self, file_path: Union[str, Path]) -> DenseMatrix:
        """Parse a matrix file.

        Args:
            file_path: Path to the matrix file

        Returns:
            Read-only float64 matrix

        Raises:
            FileNotFoundError: If the file does not exist
            ParseError: If a token is malformed or the shape is inconsistent
        """
        text = self.read_text(file_path)
        matrix = self.parse_text(text, source=str(file_path))
        logger.debug(f"Parsed {matrix.shape[0]}x{matrix.shape[1]} matrix from {file_path}")
        return matrix

    def parse_vector_file(self, file_path: Union[str, Path]) -> Vector:
        """Parse a vector file (an m x 1 matrix)."""
        matrix = self.parse_file(file_path)
        if matrix.shape[1] != 1:
            raise DimensionError(
                f"{file_path}: expected a vector (m x 1), got {matrix.shape[0]}x{matrix.shape[1]}")
        return as_vector(matrix[:, 0], str(file_path))

    def parse_text(self, text: str, source: str = "<text>") -> DenseMatrix:
        lines = [(number, line) for number, line in enumerate(text.splitlines(), start=1)
                 if line.strip() and not line.lstrip().startswith('#')]
        if not lines:
            raise ParseError("Missing 'm p' header", path=source, line=1)

        header_line, header = lines[0]
        tokens = header.split()
        if len(tokens) != 2:
            raise ParseError("Header must contain exactly two integers 'm p'",
                             path=source, line=header_line, column=1)
        m = self._parse_int(tokens[0], source, header_line, 1)
        p = self._parse_int(tokens[1], source, header_line, 2)
        if m < 1 or p < 1:
            raise ParseError("Matrix dimensions must be positive", path=source, line=header_line)

        body = lines[1:]
        if len(body) != m:
            raise ParseError(f"Expected {m} data rows, found {len(body)}",
                             path=source, line=body[-1][0] if body else header_line)

        rows: List[List[float]] = []
        for line_number, line in body:
            values = line.split()
            if len(values) != p:
                raise ParseError(f"Expected {p} values, found {len(values)}",
                                 path=source, line=line_number, column=min(len(values), p) + 1)
            rows.append([self._parse_float(token, source, line_number, column)
                         for column, token in enumerate(values, start=1)])

        return as_matrix(np.array(rows, dtype=np.float64), source)

    @staticmethod
    def _parse_int(token: str, source: str, line: int, column: int) -> int:
        try:
            return int(token)
        except ValueError:
            raise ParseError(f"Invalid integer '{token}'", path=source, line=line, column=column)

    @staticmethod
    def _parse_float(token: str, source: str, line: int, column: int) -> float:
        try:
            value = float(token)
        except ValueError:
            raise ParseError(f"Invalid number '{token}'", path=source, line=line, column=column)
        if not math.isfinite(value):
            raise ParseError(f"Non-finite value '{token}'", path=source, line=line, column=column)
        return value


def format_number(value: float) -> str:
    """Format a double with 17 significant digits (round-trip exact)."""
    return format(float(value), '.17g')


def format_matrix(matrix: np.ndarray) -> str:
    """Render a matrix, or a vector as an m x 1 matrix, in the text format."""
    array = np.asarray(matrix, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    lines = [f"{array.shape[0]} {array.shape[1]}"]
    lines.extend(" ".join(format_number(value) for value in row) for row in array)
    return "\n".join(lines) + "\n"
