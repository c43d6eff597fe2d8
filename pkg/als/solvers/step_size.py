"""
Step-size bounds and closed-form cost model.

This module provides the stability bounds on the step size of ALS and ILS,
the step-size policy used by the experiments, and the predicted multiplication
counts the instrumented solvers are checked against.
"""

import logging
from typing import Optional

from als.errors import DegenerateRowError, InvalidParameterError
from als.linalg.core import largest_singular_value, row_norms_squared
from als.models import DEFAULT_STEP_DIVISOR, DenseMatrix, Method

logger = logging.getLogger(__name__)


def max_step_size_als(H: DenseMatrix) -> float:
    """Return 1 / (2 max_i ||h_i||^2), the exclusive upper bound on mu for ALS.

    Raises:
        DegenerateRowError: If H has an all-zero row
    """
    if H.size == 0:
        raise InvalidParameterError("Observation matrix is empty")
    norms = row_norms_squared(H)
    zero_rows = (norms == 0.0).nonzero()[0]
    if zero_rows.size:
        raise DegenerateRowError(int(zero_rows[0]) + 1)
    return 1.0 / (2.0 * float(norms.max()))


def max_step_size_ils(H: DenseMatrix) -> float:
    """Return 1 / (2 s_1(H)^2), the exclusive upper bound on mu for ILS."""
    s1 = largest_singular_value(H)
    if s1 == 0.0:
        raise InvalidParameterError("Observation matrix is zero")
    return 1.0 / (2.0 * s1 * s1)


def resolve_step_size(H: DenseMatrix, method: Method,
                      mu: Optional[float] = None,
                      divisor: float = DEFAULT_STEP_DIVISOR) -> Optional[float]:
    """Return an explicit mu unchanged, or the method's bound divided by ``divisor``.

    SLS and batch LS take no step size and resolve to None.
    """
    if method in (Method.SLS, Method.BATCH):
        return None
    if mu is not None:
        if not mu > 0:
            raise InvalidParameterError(f"Step size mu must be positive, got {mu}")
        return mu
    bound = max_step_size_als(H) if method == Method.ALS else max_step_size_ils(H)
    resolved = bound / divisor
    logger.debug(f"Resolved {method.value} step size {resolved:.6g} (bound {bound:.6g} / {divisor})")
    return resolved


def multiplication_count(method: Method, m: int, p: int, N: int,
                         include_averaging: bool = True) -> Optional[int]:
    """Predicted number of multiplications of a solver run.

    ILS costs 2pm + p per iteration. ALS costs 2p + 1 per iteration plus p
    for the final scaling of the window sum, which ``include_averaging``
    toggles. SLS and batch LS have no closed form and return None; their
    cost is only available from instrumentation.
    """
    if m < 1 or p < 1 or N < 0:
        raise InvalidParameterError(f"Invalid dimensions m={m}, p={p}, N={N}")
    if method == Method.ILS:
        return (2 * p * m + p) * N
    if method == Method.ALS:
        return (2 * p + 1) * N + (p if include_averaging else 0)
    return None
