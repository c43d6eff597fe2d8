"""
Row-cyclic and full-gradient iterative least squares solvers.

ALS takes one step along a single partial gradient per iteration, re-using
the rows of H cyclically, and returns the average of the last iterates. ILS
is plain steepest descent on the full cost. Both start from the zero vector.
"""

import logging
from typing import List, Optional

import numpy as np

from als.analysis.cycle import default_iteration_count
from als.analysis.onset import detect_periodic_onset
from als.errors import DimensionError, DivergenceError, InvalidParameterError
from als.linalg.core import residual_cost
from als.models import (Method, ProblemInstance, SolverConfig, SolverRun, TraceEntry,
                        Vector)
from als.solvers.counter import MultiplicationCounter

logger = logging.getLogger(__name__)

ILS_DEFAULT_ITERATIONS = 1000


def cyclic_index(i: int, m: int) -> int:
    """Map iteration counter i >= 1 to row index ((i - 1) mod m) + 1."""
    return ((i - 1) % m) + 1


class TraceRecorder:
    """Collects trace entries every ``stride`` iterations and at the last one."""

    def __init__(self, problem: ProblemInstance, config: SolverConfig, last: int):
        self.problem = problem
        self.stride = config.trace_stride
        self.keep_estimates = config.keep_estimates
        self.last = last
        self.entries: List[TraceEntry] = []

    def record(self, k: int, x: Vector, multiplications: int) -> None:
        if k % self.stride != 0 and k != self.last:
            return
        self.entries.append(TraceEntry(
            k=k,
            multiplications=multiplications,
            residual_cost=residual_cost(self.problem, x),
            error_norm=self.problem.error_norm(x),
            estimate=x.copy() if self.keep_estimates else None,
        ))


def _require_mu(config: SolverConfig, method: Method) -> float:
    if config.mu is None:
        raise InvalidParameterError(f"{method.value.upper()} requires a step size mu")
    return config.mu


def _als_update(x: Vector, h_row: Vector, y_i: float, two_mu: float,
                counter: MultiplicationCounter) -> Vector:
    residual = y_i - counter.dot(h_row, x)
    step = counter.scalar(two_mu, residual)
    return x + counter.scale(step, h_row)


def als_step(x_prev: Vector, h_row: Vector, y_i: float, mu: float,
             counter: Optional[MultiplicationCounter] = None) -> Vector:
    """One ALS iteration x + 2 mu h (y_i - h^T x).

    Costs 2p + 1 counted multiplications; 2 mu is formed outside the count.
    """
    if x_prev.shape != h_row.shape:
        raise DimensionError(f"Iterate of shape {x_prev.shape} does not match row of shape {h_row.shape}")
    counter = counter if counter is not None else MultiplicationCounter()
    return _als_update(x_prev, h_row, float(y_i), 2.0 * mu, counter)


def resolve_iterations(problem: ProblemInstance, mu: float, policy: str = "contraction",
                       average_window: Optional[int] = None) -> int:
    """Pick N for ALS when the caller leaves it unset.

    "contraction" uses the cycle-matrix norm (see default_iteration_count).
    "onset" runs a pilot pass of that length, detects where the residual
    cost becomes periodic and returns that onset plus one cycle.
    """
    budget = default_iteration_count(problem.H, mu, average_window=average_window)
    if policy == "contraction":
        return budget
    if policy != "onset":
        raise InvalidParameterError(f"Unknown iteration policy: {policy}")

    m = problem.m
    pilot_length = max(budget, 3 * m)
    pilot = als_solve(problem, SolverConfig(mu=mu, iterations=pilot_length,
                                            record_trace=True))
    costs = [entry.residual_cost for entry in pilot.trace]
    onset = detect_periodic_onset(costs, m)
    if onset >= len(costs):
        logger.warning(f"No periodic onset within {pilot_length} pilot iterations, keeping N={pilot_length}")
        return pilot_length
    logger.info(f"Periodic onset detected at k_p={onset}, using N={onset + m}")
    return onset + m


def als_solve(problem: ProblemInstance, config: SolverConfig) -> SolverRun:
    """Run ALS and return the average of the last ``average_window`` iterates.

    Args:
        problem: Problem instance
        config: Solver configuration; mu is required

    Returns:
        SolverRun with the averaged estimate and the counted multiplications,
        (2p + 1) N + p

    Raises:
        InvalidParameterError: If mu is missing or N < average_window
        DivergenceError: If an iterate becomes non-finite
    """
    mu = _require_mu(config, Method.ALS)
    m, p = problem.m, problem.p
    N = config.iterations if config.iterations is not None else resolve_iterations(
        problem, mu, average_window=config.average_window)
    window = config.average_window if config.average_window is not None else m
    if N < window:
        raise InvalidParameterError(f"Iteration count N={N} is smaller than the averaging window {window}")

    H, y = problem.H, problem.y
    counter = MultiplicationCounter()
    recorder = TraceRecorder(problem, config, N) if config.record_trace else None
    two_mu = 2.0 * mu
    x = np.zeros(p)
    window_sum = np.zeros(p)
    first_averaged = N - window + 1

    with np.errstate(over='ignore', invalid='ignore'):
        for k in range(1, N + 1):
            row = cyclic_index(k, m) - 1
            x = _als_update(x, H[row], y[row], two_mu, counter)
            if not np.all(np.isfinite(x)):
                raise DivergenceError(Method.ALS.value, k)
            if k >= first_averaged:
                window_sum += x
            if recorder is not None:
                recorder.record(k, x, counter.total)

        estimate = counter.scale(1.0 / window, window_sum)
        if not np.all(np.isfinite(estimate)):
            raise DivergenceError(Method.ALS.value, N)

    logger.debug(f"ALS finished: m={m}, p={p}, mu={mu:.6g}, N={N}, multiplications={counter.total}")
    return SolverRun(
        method=Method.ALS,
        estimate=estimate,
        multiplications=counter.total,
        iterations=N,
        trace=recorder.entries if recorder is not None else None,
        mu=mu,
        average_window=window,
    )


def _partial_gradient_sum(problem: ProblemInstance, x: Vector,
                          counter: MultiplicationCounter) -> Vector:
    """Sum over all rows of h_i (y_i - h_i^T x), i.e. H^T (y - H x)."""
    residual = problem.y - counter.mat_vec(problem.H, x)
    return counter.rmat_vec(problem.H, residual)


def ils_gradient(problem: ProblemInstance, x_hat: Vector) -> Vector:
    """Gradient of the cost J at x_hat, -2 H^T y + 2 H^T H x_hat."""
    if x_hat.shape != (problem.p,):
        raise DimensionError(f"Estimate of shape {x_hat.shape} does not match p={problem.p}")
    return -2.0 * _partial_gradient_sum(problem, x_hat, MultiplicationCounter())


def ils_solve(problem: ProblemInstance, config: SolverConfig) -> SolverRun:
    """Run steepest descent on the least squares cost.

    Every iteration recomputes the partial-gradient sum over all m rows, so
    the counted cost is exactly (2pm + p) N. The estimate is the last iterate.

    Raises:
        InvalidParameterError: If mu is missing
        DivergenceError: If an iterate becomes non-finite
    """
    mu = _require_mu(config, Method.ILS)
    N = config.iterations if config.iterations is not None else ILS_DEFAULT_ITERATIONS
    counter = MultiplicationCounter()
    recorder = TraceRecorder(problem, config, N) if config.record_trace else None
    two_mu = 2.0 * mu
    x = np.zeros(problem.p)

    with np.errstate(over='ignore', invalid='ignore'):
        for k in range(1, N + 1):
            x = x + counter.scale(two_mu, _partial_gradient_sum(problem, x, counter))
            if not np.all(np.isfinite(x)):
                raise DivergenceError(Method.ILS.value, k)
            if recorder is not None:
                recorder.record(k, x, counter.total)

    logger.debug(f"ILS finished: m={problem.m}, p={problem.p}, mu={mu:.6g}, N={N}, "
                 f"multiplications={counter.total}")
    return SolverRun(
        method=Method.ILS,
        estimate=x,
        multiplications=counter.total,
        iterations=N,
        trace=recorder.entries if recorder is not None else None,
        mu=mu,
    )
