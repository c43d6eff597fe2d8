"""
Batch least squares as a solver run.

Thin wrapper around the normal-equation oracle in als.linalg so the batch
estimate can be traced and reported next to the iterative solvers.
"""

from als.linalg.core import batch_ls_solve
from als.models import Method, ProblemInstance, SolverRun


def cholesky_solve_multiplications(p: int) -> int:
    """Multiplications and divisions of a textbook Cholesky solve of a p x p system.

    Column j of the factor costs j products for the pivot and j + 1 per entry
    below it; each triangular solve costs p (p + 1) / 2.
    """
    factor = sum(j + (p - j - 1) * (j + 1) for j in range(p))
    return factor + p * (p + 1)


def batch_solve(problem: ProblemInstance) -> SolverRun:
    """Solve the normal equations and report the arithmetic they take.

    Forming H^T H and H^T y costs m p^2 + m p; the factorization and the two
    triangular solves are added from cholesky_solve_multiplications.
    """
    m, p = problem.m, problem.p
    estimate = batch_ls_solve(problem)
    return SolverRun(
        method=Method.BATCH,
        estimate=estimate,
        multiplications=m * p * p + m * p + cholesky_solve_multiplications(p),
        iterations=1,
    )
