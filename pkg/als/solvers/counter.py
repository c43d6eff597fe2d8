"""
Multiplication counting for the iterative solvers.

The solvers route every multiplying operation through a MultiplicationCounter
so that the reported cost is measured, not predicted. Divisions count as
multiplications; additions are free. Sums run left to right through
als.linalg.core for every method alike.
"""

from dataclasses import dataclass

import numpy as np

from als.errors import DimensionError
from als.linalg import core
from als.models import DenseMatrix, Vector


@dataclass
class MultiplicationCounter:
    """Counting wrappers around the products the solvers perform."""

    total: int = 0

    def dot(self, u: Vector, v: Vector) -> float:
        """Inner product, p multiplications."""
        if u.shape != v.shape:
            raise DimensionError(f"Cannot take inner product of shapes {u.shape} and {v.shape}")
        self.total += u.shape[0]
        return core.dot(u, v)

    def scalar(self, a: float, b: float) -> float:
        """Scalar product, one multiplication."""
        self.total += 1
        return a * b

    def reciprocal(self, a: float) -> float:
        self.total += 1
        return 1.0 / a

    def scale(self, a: float, v: Vector) -> Vector:
        """Scalar times vector, len(v) multiplications."""
        self.total += v.shape[0]
        return a * v

    def mat_vec(self, A: DenseMatrix, v: Vector) -> Vector:
        """A v, rows(A) * cols(A) multiplications."""
        if A.shape[1] != v.shape[0]:
            raise DimensionError(f"Cannot multiply {A.shape} matrix by vector of shape {v.shape}")
        self.total += A.shape[0] * A.shape[1]
        return core.mat_vec(A, v)

    def rmat_vec(self, A: DenseMatrix, v: Vector) -> Vector:
        """A^T v, rows(A) * cols(A) multiplications."""
        if A.shape[0] != v.shape[0]:
            raise DimensionError(f"Cannot multiply transpose of {A.shape} by vector of shape {v.shape}")
        self.total += A.shape[0] * A.shape[1]
        return core.mat_vec(A.T, v)

    def outer(self, u: Vector, v: Vector) -> DenseMatrix:
        self.total += u.shape[0] * v.shape[0]
        return np.outer(u, v)

    def scale_matrix(self, a: float, A: DenseMatrix) -> DenseMatrix:
        self.total += A.size
        return a * A
