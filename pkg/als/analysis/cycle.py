"""
Iteration and cycle matrices of ALS.

One ALS step on row i maps the error e to M_i e with M_i = I - 2 mu h_i h_i^T.
A full pass over the rows applies the cycle matrix M = M_m ... M_1; its
spectral norm decides whether the noise-free iteration contracts.
"""

import logging
import math
from typing import Optional

import numpy as np

from als.errors import InvalidParameterError
from als.linalg.core import largest_singular_value
from als.models import CycleAnalysis, DenseMatrix, Vector

logger = logging.getLogger(__name__)

STABILITY_MARGIN = 1e-12
DEFAULT_CONTRACTION_TARGET = 1e-8
MAX_CYCLES = 5000
FALLBACK_CYCLES = 200


def row_iteration_matrix(h_row: Vector, mu: float) -> DenseMatrix:
    """Return I - 2 mu h h^T.

    Its eigenvalue along h is 1 - 2 mu ||h||^2; every direction orthogonal to
    h is left unchanged.
    """
    if not mu > 0:
        raise InvalidParameterError(f"Step size mu must be positive, got {mu}")
    p = h_row.shape[0]
    return np.eye(p) - 2.0 * mu * np.outer(h_row, h_row)


def cycle_matrix(H: DenseMatrix, mu: float) -> CycleAnalysis:
    """Multiply the per-row matrices in the order M_m M_(m-1) ... M_1.

    Raises:
        InvalidParameterError: If mu is not positive
        ConvergenceError: If the spectral norm estimate does not converge
    """
    per_row = [row_iteration_matrix(h_row, mu) for h_row in H]
    product = np.eye(H.shape[1])
    for row_matrix in per_row:
        product = row_matrix @ product

    spectral_norm = largest_singular_value(product)
    stable = spectral_norm < 1.0 - STABILITY_MARGIN
    logger.debug(f"Cycle matrix for {H.shape[0]}x{H.shape[1]}, mu={mu:.6g}: "
                 f"||M||_2={spectral_norm:.6g}, stable={stable}")
    return CycleAnalysis(
        per_row_matrices=per_row,
        cycle_matrix=product,
        spectral_norm=spectral_norm,
        stable=stable,
        mu=mu,
    )


def default_iteration_count(H: DenseMatrix, mu: float,
                            target: float = DEFAULT_CONTRACTION_TARGET,
                            max_cycles: int = MAX_CYCLES,
                            fallback_cycles: int = FALLBACK_CYCLES,
                            average_window: Optional[int] = None) -> int:
    """Iteration count whose averaging window starts after the contraction.

    c is the smallest cycle count with ||M||_2^c <= target, capped at
    ``max_cycles``; the result is (c + ceil(window / m)) m, so every iterate
    in the window of ``average_window`` (default m) lies after c full cycles.
    ``fallback_cycles`` cycles are used when ||M||_2 is not safely below one.
    """
    m = H.shape[0]
    window = average_window if average_window is not None else m
    if window < 1:
        raise InvalidParameterError(f"Averaging window must be >= 1, got {window}")
    norm = cycle_matrix(H, mu).spectral_norm
    if norm >= 1.0 - STABILITY_MARGIN:
        logger.warning(f"||M||_2={norm:.6g} is not below one, using {fallback_cycles} cycles")
        return max(fallback_cycles * m, window)
    if norm == 0.0:
        cycles = 1
    else:
        cycles = math.ceil(math.log(target) / math.log(norm))
    cycles = max(1, min(cycles, max_cycles))
    return (cycles + math.ceil(window / m)) * m
