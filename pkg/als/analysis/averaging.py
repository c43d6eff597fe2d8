"""
Error of the final window average.

Averaging the last iterates averages their error vectors, which is what
makes the ALS estimate less sensitive to noise than its individual iterates.
"""

from typing import Sequence

import numpy as np

from als.errors import DimensionError, InvalidParameterError
from als.models import AveragingSummary, SolverRun, Vector


def averaged_error(trace_window: Sequence[Vector], x_true: Vector) -> Vector:
    """Return the mean of (x^(k) - x_true) over the window."""
    if len(trace_window) == 0:
        raise InvalidParameterError("Averaging window is empty")
    stacked = np.vstack(trace_window)
    if stacked.shape[1] != x_true.shape[0]:
        raise DimensionError(
            f"Window vectors of length {stacked.shape[1]} do not match x_true of length {x_true.shape[0]}")
    return np.mean(stacked - x_true, axis=0)


def averaging_summary(run: SolverRun, x_true: Vector) -> AveragingSummary:
    """Compare the averaged error with the errors of the window iterates.

    The run must have been recorded with stride 1 and kept estimates.
    """
    window = run.window_estimates()
    if len(window) != run.average_window:
        raise InvalidParameterError(
            "Run does not hold every window iterate; record with trace_stride=1 and keep_estimates")
    norms = [float(np.linalg.norm(estimate - x_true)) for estimate in window]
    return AveragingSummary(
        averaged_norm=float(np.linalg.norm(run.estimate - x_true)),
        window_mean_norm=float(np.mean(norms)),
        window_max_norm=max(norms),
    )
