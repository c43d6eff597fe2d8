"""
Dense linear algebra for the ALS toolkit.

This module provides the small set of vector and matrix operations the
solvers and the analysis need: products, norms, a power-iteration estimate of
the largest singular value and the batch least squares oracle computed from
the normal equations.
"""

import logging
import math

import numpy as np
import scipy.linalg

from als.errors import ConvergenceError, DimensionError, InvalidParameterError, RankError
from als.models import DenseMatrix, ProblemInstance, Vector

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-12
POWER_ITERATION_TOL = 1e-10
POWER_ITERATION_MAX_ITER = 10000
SQUARING_INTERVAL = 64
SECOND_START_SEED = 20240917


def mat_vec(A: DenseMatrix, v: Vector) -> Vector:
    """Return A v, each entry summed left to right over the columns.

    The sum order is the one ``dot`` uses, so row i of the result is
    bit-identical to ``dot(A[i], v)``.

    Raises:
        DimensionError: If the column count of A differs from len(v)
    """
    if A.ndim != 2 or v.ndim != 1 or A.shape[1] != v.shape[0]:
        raise DimensionError(f"Cannot multiply {A.shape} matrix by vector of shape {v.shape}")
    if A.shape[1] == 0:
        return np.zeros(A.shape[0])
    return np.add.accumulate(A * v, axis=1)[:, -1]


def dot(u: Vector, v: Vector) -> float:
    """Return the inner product of two equal-length vectors, summed left to right."""
    if u.shape != v.shape or u.ndim != 1:
        raise DimensionError(f"Cannot take inner product of shapes {u.shape} and {v.shape}")
    if u.shape[0] == 0:
        return 0.0
    return float(np.add.accumulate(u * v)[-1])


def two_norm(v: Vector) -> float:
    return math.sqrt(dot(v, v))


def row_norms_squared(A: DenseMatrix) -> Vector:
    """Squared Euclidean norm of every row of A."""
    return np.einsum("ij,ij->i", A, A)


def _power_iteration(gram: np.ndarray, x: Vector, tol: float, max_iter: int) -> float:
    """Dominant eigenvalue of the PSD matrix ``gram`` reached from the unit vector ``x``.

    Returns 0.0 when ``x`` lies in the null space of ``gram``.
    """
    operator = gram
    lam = 0.0
    for iteration in range(1, max_iter + 1):
        z = operator @ x
        z_norm = float(np.linalg.norm(z))
        if z_norm == 0.0:
            return 0.0

        x = z / z_norm
        lam_new = float(x @ (gram @ x))
        if abs(lam_new - lam) <= tol * abs(lam_new):
            logger.debug(f"Power iteration converged after {iteration} iterations")
            return max(lam_new, 0.0)
        lam = lam_new

        if iteration % SQUARING_INTERVAL == 0:
            operator = operator @ operator
            operator = operator / float(np.max(np.abs(operator)))

    raise ConvergenceError(math.sqrt(max(lam, 0.0)), max_iter)


def largest_singular_value(A: DenseMatrix,
                           tol: float = POWER_ITERATION_TOL,
                           max_iter: int = POWER_ITERATION_MAX_ITER) -> float:
    """Estimate s_1(A) by power iteration on A^T A.

    The iteration runs twice: from the normalized all-ones vector and from a
    fixed pseudo-random vector drawn with SECOND_START_SEED, and the larger
    estimate wins. A single symmetric start can be an eigenvector of a
    smaller eigenvalue (A = [[2, -1], [-1, 2]] is one) and then never leaves
    it. Every SQUARING_INTERVAL steps the iteration operator is replaced by
    its (rescaled) square, which leaves the dominant eigenvector unchanged
    and squares the eigenvalue ratio that limits the convergence rate. Each
    run stops once the Rayleigh quotient of A^T A changes by less than
    ``tol`` relative to its value.

    Args:
        A: Nonempty matrix
        tol: Relative tolerance on the squared singular value
        max_iter: Iteration budget of each run

    Returns:
        The largest singular value of A

    Raises:
        InvalidParameterError: If A is empty or tol is not positive
        ConvergenceError: If a run exhausts its budget; carries the last estimate
    """
    if A.ndim != 2 or A.size == 0:
        raise InvalidParameterError("Singular value of an empty matrix is undefined")
    if tol <= 0:
        raise InvalidParameterError("Tolerance must be positive")

    gram = A.T @ A
    if not np.any(gram):
        return 0.0
    p = gram.shape[0]

    ones = np.ones(p) / math.sqrt(p)
    scattered = np.random.default_rng(SECOND_START_SEED).standard_normal(p)
    scattered /= float(np.linalg.norm(scattered))

    lam = max(_power_iteration(gram, start, tol, max_iter) for start in (ones, scattered))
    return math.sqrt(lam)


def _normal_equation_factor(H: DenseMatrix) -> np.ndarray:
    """Cholesky factor of H^T H with the relative-pivot rank check."""
    gram = H.T @ H
    try:
        lower = scipy.linalg.cholesky(gram, lower=True)
    except np.linalg.LinAlgError as e:
        raise RankError(f"Observation matrix is rank deficient: {e}")

    pivots = np.diag(lower) ** 2
    if pivots.min() < RANK_TOLERANCE * pivots.max():
        raise RankError(
            f"Observation matrix is rank deficient (pivot ratio "
            f"{pivots.min() / pivots.max():.3e} < {RANK_TOLERANCE})")
    return lower


def check_full_rank(H: DenseMatrix) -> None:
    """Raise RankError unless H has full column rank."""
    _normal_equation_factor(H)


def is_full_rank(H: DenseMatrix) -> bool:
    try:
        _normal_equation_factor(H)
    except RankError:
        return False
    return True


def batch_ls_solve(problem: ProblemInstance) -> Vector:
    """Return the least squares estimate (H^T H)^-1 H^T y.

    Raises:
        RankError: If the smallest Cholesky pivot of H^T H falls below
            RANK_TOLERANCE times the largest
    """
    lower = _normal_equation_factor(problem.H)
    rhs = problem.H.T @ problem.y
    return scipy.linalg.cho_solve((lower, True), rhs)


def residual_cost(problem: ProblemInstance, x_hat: Vector) -> float:
    """Return J(x_hat) = (y - H x_hat)^T (y - H x_hat)."""
    residual = problem.y - mat_vec(problem.H, x_hat)
    return dot(residual, residual)
