"""
Exception hierarchy for the ALS toolkit.

Every error carries the process exit code the command line front end reports
for it. Input-related errors also derive from ValueError so callers that
only know about builtin exceptions can still catch them.
"""

from enum import IntEnum
from typing import Optional

import numpy as np


class ExitCode(IntEnum):
    """Process exit codes of the command line front end."""

    OK = 0
    INTERNAL = 1
    INVALID_INPUT = 2
    DIMENSION = 3
    RANK = 4
    DIVERGENCE = 5
    SWEEP_DIVERGENCE = 6


class AlsError(Exception):
    """Base class for all toolkit errors."""

    exit_code = ExitCode.INTERNAL


class ParseError(AlsError, ValueError):
    """Raised when a matrix, vector or manifest file cannot be parsed."""

    exit_code = ExitCode.INVALID_INPUT

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        self.path = path
        self.line = line
        self.column = column
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
                if column is not None:
                    location += f":{column}"
            location += ": "
        super().__init__(f"{location}{message}")


class InvalidParameterError(AlsError, ValueError):
    """Raised when a parameter is outside its domain (e.g. mu <= 0)."""

    exit_code = ExitCode.INVALID_INPUT


class TraceTooShortError(AlsError, ValueError):
    """Raised when an error-norm trace is too short for onset detection."""

    exit_code = ExitCode.INVALID_INPUT


class DimensionError(AlsError, ValueError):
    """Raised when operand dimensions do not agree."""

    exit_code = ExitCode.DIMENSION


class DegenerateRowError(AlsError, ValueError):
    """Raised when an observation matrix contains an all-zero row."""

    exit_code = ExitCode.DIMENSION

    def __init__(self, row: int):
        self.row = row
        super().__init__(f"Row {row} of the observation matrix is all zeros")


class RankError(AlsError, ValueError):
    """Raised when the observation matrix is not of full column rank."""

    exit_code = ExitCode.RANK


class GenerationError(RankError):
    """Raised when a generator cannot produce a full-rank instance."""


class DivergenceError(AlsError):
    """Raised when an iterate becomes non-finite."""

    exit_code = ExitCode.DIVERGENCE

    def __init__(self, method: str, iteration: int):
        self.method = method
        self.iteration = iteration
        super().__init__(f"{method.upper()} diverged: non-finite iterate at k={iteration}")


class ConvergenceError(AlsError):
    """Raised when power iteration fails to reach its tolerance.

    The last estimate is kept so callers can still report it.
    """

    def __init__(self, estimate: float, iterations: int):
        self.estimate = estimate
        self.iterations = iterations
        super().__init__(
            f"Power iteration did not converge after {iterations} iterations "
            f"(last estimate {estimate!r})")


class RecursionConsistencyError(AlsError):
    """Raised when the replayed error recursion disagrees with a solver trace."""

    def __init__(self, iteration: int, deviation: float):
        self.iteration = iteration
        self.deviation = deviation
        super().__init__(
            f"Error recursion deviates from solver trace at k={iteration} "
            f"by {deviation:.3e}")


def ensure_finite(values: np.ndarray, name: str) -> None:
    """Reject arrays containing NaN or infinity."""
    if not np.all(np.isfinite(values)):
        raise InvalidParameterError(f"{name} contains non-finite entries")
