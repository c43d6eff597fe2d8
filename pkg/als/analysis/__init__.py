"""
Convergence analysis module for the ALS toolkit.

This module provides the per-row and cycle iteration matrices, the default
iteration-count policy, periodic-onset detection and window-averaging
statistics. The error-recursion replay lives in als.analysis.recursion and is
imported from there, since it runs the solvers.
"""

from als.analysis.averaging import averaged_error, averaging_summary
from als.analysis.cycle import cycle_matrix, default_iteration_count, row_iteration_matrix
from als.analysis.onset import detect_periodic_onset

__all__ = ['averaged_error', 'averaging_summary', 'cycle_matrix',
           'default_iteration_count', 'detect_periodic_onset', 'row_iteration_matrix']
