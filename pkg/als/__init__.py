"""
Approximate least squares toolkit.

This package provides the ALS row-cyclic least squares iteration together with
batch, gradient-descent and sequential baselines, convergence analysis of the
cycle matrix, and the Monte-Carlo experiments used to compare the estimators.
"""

__version__ = '0.1.0'
