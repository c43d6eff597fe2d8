"""
Solvers module for the ALS toolkit.

This module provides the ALS, ILS and SLS estimators, the batch least squares
solution as a solver run, step-size bounds and the multiplication cost model.
"""

from als.linalg.core import batch_ls_solve
from als.solvers.batch import batch_solve
from als.solvers.counter import MultiplicationCounter
from als.solvers.iterative import (als_solve, als_step, cyclic_index, ils_gradient,
                                   ils_solve, resolve_iterations)
from als.solvers.sequential import initial_sls_state, sls_solve, sls_update
from als.solvers.step_size import (max_step_size_als, max_step_size_ils,
                                   multiplication_count, resolve_step_size)

__all__ = ['MultiplicationCounter', 'als_solve', 'als_step', 'batch_ls_solve',
           'batch_solve', 'cyclic_index', 'ils_gradient', 'ils_solve',
           'initial_sls_state', 'max_step_size_als', 'max_step_size_ils',
           'multiplication_count', 'resolve_iterations', 'resolve_step_size',
           'sls_solve', 'sls_update']
