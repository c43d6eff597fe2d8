"""
Sequential least squares.

Standard recursive least squares: one pass over the rows of H, each update
recomputing the gain vector from the running inverse-information matrix P.
P starts at ``initial_scale`` times the identity and the estimate at zero, so
the result approaches the batch solution as ``initial_scale`` grows.
"""

import logging
from typing import Optional

import numpy as np

from als.errors import DimensionError, InvalidParameterError
from als.models import (DEFAULT_SLS_INITIAL_SCALE, Method, ProblemInstance, SlsState,
                        SolverConfig, SolverRun, Vector)
from als.solvers.counter import MultiplicationCounter
from als.solvers.iterative import TraceRecorder

logger = logging.getLogger(__name__)


def initial_sls_state(p: int, initial_scale: float = DEFAULT_SLS_INITIAL_SCALE) -> SlsState:
    if not initial_scale > 0:
        raise InvalidParameterError(f"Initial scale must be positive, got {initial_scale}")
    return SlsState(
        estimate=np.zeros(p),
        gain=np.zeros(p),
        inverse_information=initial_scale * np.eye(p),
    )


def sls_update(state: SlsState, h_row: Vector, y_k: float,
               counter: MultiplicationCounter) -> SlsState:
    """Fold one measurement into the recursion.

    K = P h / (1 + h^T P h), x <- x + K (y_k - h^T x), P <- P - K (P h)^T,
    after which P is re-symmetrized.
    """
    P = state.inverse_information
    if h_row.shape[0] != P.shape[0]:
        raise DimensionError(f"Row of length {h_row.shape[0]} does not match p={P.shape[0]}")

    Ph = counter.mat_vec(P, h_row)
    denominator = 1.0 + counter.dot(h_row, Ph)
    gain = counter.scale(counter.reciprocal(denominator), Ph)

    innovation = y_k - counter.dot(h_row, state.estimate)
    estimate = state.estimate + counter.scale(innovation, gain)

    P = P - counter.outer(gain, Ph)
    P = counter.scale_matrix(0.5, P + P.T)
    return SlsState(estimate=estimate, gain=gain, inverse_information=P)


def sls_solve(problem: ProblemInstance,
              initial_scale: float = DEFAULT_SLS_INITIAL_SCALE,
              config: Optional[SolverConfig] = None) -> SolverRun:
    """Run m sequential updates over the rows of H.

    Only the trace options of ``config`` are used.

    Returns:
        SolverRun whose multiplication count comes from instrumentation
    """
    config = config if config is not None else SolverConfig()
    counter = MultiplicationCounter()
    state = initial_sls_state(problem.p, initial_scale)
    recorder = TraceRecorder(problem, config, problem.m) if config.record_trace else None

    for k in range(1, problem.m + 1):
        state = sls_update(state, problem.H[k - 1], problem.y[k - 1], counter)
        if recorder is not None:
            recorder.record(k, state.estimate, counter.total)

    logger.debug(f"SLS finished: m={problem.m}, p={problem.p}, initial_scale={initial_scale:.3g}, "
                 f"multiplications={counter.total}")
    return SolverRun(
        method=Method.SLS,
        estimate=state.estimate,
        multiplications=counter.total,
        iterations=problem.m,
        trace=recorder.entries if recorder is not None else None,
    )
