"""
Replay of the ALS error recursion.

With e^(k) = x^(k) - x, one ALS step gives e^(k) = M_k e^(k-1) + 2 mu h_k n_k
(row indices taken cyclically). The replay propagates the initial-error part
and the noise-driven part separately and checks that they add up to the error
of an actual solver run.
"""

import logging
from typing import List, Optional

import numpy as np

from als.errors import InvalidParameterError, RecursionConsistencyError
from als.models import ErrorDecomposition, ProblemInstance, SolverConfig, Vector
from als.solvers.iterative import als_solve, cyclic_index

logger = logging.getLogger(__name__)

REPLAY_TOLERANCE = 1e-10


def _apply_row_matrix(e: Vector, h_row: Vector, two_mu: float) -> Vector:
    # M_i e without forming M_i
    return e - two_mu * float(h_row @ e) * h_row


def propagate_noise_error(problem: ProblemInstance, mu: float, iterations: int,
                          noise: Optional[Vector] = None) -> List[Vector]:
    """Run only the noise-driven recursion, e_noise^(0) = 0.

    ``noise`` defaults to the problem's own noise vector. The recursion is
    linear in the noise, so scaling ``noise`` scales every returned vector.
    """
    noise = problem.noise if noise is None else np.asarray(noise, dtype=np.float64)
    if noise is None:
        raise InvalidParameterError("Noise recursion needs a noise vector")
    two_mu = 2.0 * mu
    e_noise = np.zeros(problem.p)
    history = []
    for k in range(1, iterations + 1):
        row = cyclic_index(k, problem.m) - 1
        h_row = problem.H[row]
        e_noise = _apply_row_matrix(e_noise, h_row, two_mu) + two_mu * noise[row] * h_row
        history.append(e_noise)
    return history


def replay_error_recursion(problem: ProblemInstance, config: SolverConfig,
                           tolerance: float = REPLAY_TOLERANCE) -> List[ErrorDecomposition]:
    """Decompose the ALS error into e_init + e_noise at every iteration.

    Runs als_solve with a full trace and checks, at every k, that
    e_init^(k) + e_noise^(k) matches x^(k) - x_true within ``tolerance``
    in max-norm.

    Raises:
        InvalidParameterError: If the problem lacks x_true or noise, or mu is unset
        RecursionConsistencyError: If the replay and the solver trace disagree
    """
    if problem.x_true is None or problem.noise is None:
        raise InvalidParameterError("Error replay needs both x_true and noise")
    if config.mu is None:
        raise InvalidParameterError("Error replay needs a step size mu")

    traced = SolverConfig(mu=config.mu, iterations=config.iterations,
                          average_window=config.average_window,
                          record_trace=True, trace_stride=1, keep_estimates=True)
    run = als_solve(problem, traced)

    two_mu = 2.0 * config.mu
    e_init = -problem.x_true.copy()
    e_noise = np.zeros(problem.p)
    decompositions = []
    worst = 0.0

    for entry in run.trace:
        row = cyclic_index(entry.k, problem.m) - 1
        h_row = problem.H[row]
        e_init = _apply_row_matrix(e_init, h_row, two_mu)
        e_noise = _apply_row_matrix(e_noise, h_row, two_mu) + two_mu * problem.noise[row] * h_row
        e_total = e_init + e_noise

        deviation = float(np.max(np.abs(e_total - (entry.estimate - problem.x_true))))
        worst = max(worst, deviation)
        if deviation > tolerance:
            raise RecursionConsistencyError(entry.k, deviation)

        decompositions.append(ErrorDecomposition(
            k=entry.k, e_total=e_total, e_init=e_init, e_noise=e_noise))

    logger.debug(f"Replayed {len(decompositions)} iterations, max deviation {worst:.3e}")
    return decompositions
