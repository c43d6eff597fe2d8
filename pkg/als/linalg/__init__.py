"""
Linear algebra module for the ALS toolkit.

This module provides dense vector and matrix operations, the largest
singular value estimate and the batch least squares oracle.
"""

from als.linalg.core import (batch_ls_solve, check_full_rank, dot, is_full_rank,
                             largest_singular_value, mat_vec, residual_cost,
                             row_norms_squared, two_norm)

__all__ = ['batch_ls_solve', 'check_full_rank', 'dot', 'is_full_rank',
           'largest_singular_value', 'mat_vec', 'residual_cost',
           'row_norms_squared', 'two_norm']
