"""
Empirical detection of the periodic regime of an ALS error trace.

Once the initial-error part has died out, the error of ALS repeats with the
row period m. The detector compares consecutive cycles of a trace.
"""

from typing import Sequence

import numpy as np

from als.errors import InvalidParameterError, TraceTooShortError

DEFAULT_REL_TOL = 1e-3
ABSOLUTE_FLOOR = 1e-14


def detect_periodic_onset(error_norm_trace: Sequence[float], m: int,
                          rel_tol: float = DEFAULT_REL_TOL,
                          abs_tol: float = ABSOLUTE_FLOOR) -> int:
    """Return the first cycle-aligned index k_p after which the trace is periodic.

    Entry j of the trace belongs to iteration j + 1. Cycle c covers entries
    c m .. (c + 1) m - 1; the onset is c m for the smallest c whose cycle
    differs from the next one by at most ``rel_tol`` times their largest
    magnitude in max-norm (or by ``abs_tol``, so a trace that has decayed to
    rounding level counts as periodic).

    Args:
        error_norm_trace: Error norms (or any per-iteration scalar) from k = 1
        m: Row period
        rel_tol: Relative cycle-to-cycle tolerance
        abs_tol: Absolute floor for the comparison

    Returns:
        k_p, or len(error_norm_trace) when no periodic cycle pair exists

    Raises:
        TraceTooShortError: If the trace holds fewer than three cycles
    """
    if m < 1:
        raise InvalidParameterError(f"Period must be positive, got {m}")
    trace = np.asarray(error_norm_trace, dtype=np.float64)
    if trace.shape[0] < 3 * m:
        raise TraceTooShortError(f"Trace of length {trace.shape[0]} is shorter than 3m={3 * m}")

    cycles = trace.shape[0] // m
    for c in range(cycles - 1):
        current = trace[c * m:(c + 1) * m]
        following = trace[(c + 1) * m:(c + 2) * m]
        difference = float(np.max(np.abs(current - following)))
        scale = max(float(np.max(np.abs(current))), float(np.max(np.abs(following))))
        if difference <= max(rel_tol * scale, abs_tol):
            return c * m
    return trace.shape[0]
