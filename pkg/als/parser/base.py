"""
Base parser interface for ALS input files.

This module defines the base interface shared by the matrix/vector text
parser and the run manifest parser.
"""

import abc
from pathlib import Path
from typing import Any, Tuple, Union

from als.errors import ParseError


class InputParser(abc.ABC):
    """Base class for input file parsers."""

    # Accepted file extensions; an empty tuple accepts any extension
    valid_extensions: Tuple[str, ...] = ()

    @abc.abstractmethod
    def parse_file(self, file_path: Union[str, Path]) -> Any:
        """Parse a file and return its structured content.

        Args:
            file_path: Path to the input file

        Returns:
            Parsed content

        Raises:
            FileNotFoundError: If the file does not exist
            ParseError: If the file content is invalid
        """
        pass

    def validate_file(self, file_path: Union[str, Path]) -> bool:
        """Validate that the file exists and has a valid extension.

        Args:
            file_path: Path to the input file

        Returns:
            True if the file is valid, False otherwise
        """
        path = Path(file_path)

        if not path.is_file():
            return False

        if self.valid_extensions and path.suffix.lower() not in self.valid_extensions:
            return False

        return True

    def read_text(self, file_path: Union[str, Path]) -> str:
        """Read a file after validating it.

        Raises:
            FileNotFoundError: If the file does not exist
            ParseError: If the extension is not accepted
        """
        path = Path(file_path)
        if not path.exists():
            raise FileNotFoundError(f"File not found: {file_path}")
        if not self.validate_file(path):
            raise ParseError(
                f"Invalid file type, expected one of {', '.join(self.valid_extensions)}",
                path=str(path))
        return path.read_text(encoding='utf-8')
