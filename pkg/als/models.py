"""
Data models for the ALS toolkit.

This module defines the core data structures used throughout the package,
including problem instances, solver configuration and results, convergence
analysis records, experiment specifications and the run manifest.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from als.errors import DimensionError, InvalidParameterError, ensure_finite

Vector = npt.NDArray[np.float64]
DenseMatrix = npt.NDArray[np.float64]

DEFAULT_STEP_DIVISOR = 2.05
DEFAULT_SLS_INITIAL_SCALE = 1e9

# Noise levels and observation-matrix shapes of the random-matrix study.
NOISE_LEVELS: Tuple[float, ...] = (1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0)
TABLE_DIMS: Tuple[Tuple[int, int], ...] = tuple(
    (m, p) for m in (100, 1000) for p in (1, 2, 3, 5, 10))


class Method(str, Enum):
    """Least squares estimators offered by the toolkit."""

    ALS = "als"
    ILS = "ils"
    SLS = "sls"
    BATCH = "batch"


def as_vector(values, name: str = "vector") -> Vector:
    """Convert values to a read-only float64 vector of length >= 1."""
    array = np.array(values, dtype=np.float64).reshape(-1)
    if array.size < 1:
        raise DimensionError(f"{name} must have at least one element")
    ensure_finite(array, name)
    array.setflags(write=False)
    return array


def as_matrix(values, name: str = "matrix") -> DenseMatrix:
    """Convert values to a read-only, row-major float64 matrix."""
    array = np.array(values, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
        raise DimensionError(f"{name} must be a nonempty two-dimensional array")
    ensure_finite(array, name)
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class ProblemInstance:
    """A linear model y = H x + n with optional ground truth."""

    H: DenseMatrix
    y: Vector
    x_true: Optional[Vector] = None
    noise: Optional[Vector] = None

    def __post_init__(self):
        H = as_matrix(self.H, "H")
        y = as_vector(self.y, "y")
        m, p = H.shape
        if y.shape[0] != m:
            raise DimensionError(f"y has length {y.shape[0]}, expected {m}")
        if m < p:
            raise DimensionError(f"Observation matrix must have m >= p, got {m}x{p}")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "y", y)

        if self.x_true is not None:
            x_true = as_vector(self.x_true, "x_true")
            if x_true.shape[0] != p:
                raise DimensionError(f"x_true has length {x_true.shape[0]}, expected {p}")
            object.__setattr__(self, "x_true", x_true)
        if self.noise is not None:
            noise = as_vector(self.noise, "noise")
            if noise.shape[0] != m:
                raise DimensionError(f"noise has length {noise.shape[0]}, expected {m}")
            object.__setattr__(self, "noise", noise)

    @property
    def m(self) -> int:
        return self.H.shape[0]

    @property
    def p(self) -> int:
        return self.H.shape[1]

    @property
    def has_ground_truth(self) -> bool:
        return self.x_true is not None

    def error_norm(self, estimate: Vector) -> Optional[float]:
        """Return ||estimate - x_true||_2, or None without ground truth."""
        if self.x_true is None:
            return None
        return float(np.linalg.norm(estimate - self.x_true))


@dataclass(frozen=True)
class SolverConfig:
    """Parameters shared by the iterative solvers.

    ``iterations`` and ``average_window`` may be left unset; ALS then picks N
    from the cycle-matrix policy and averages over the last m iterates.
    """

    mu: Optional[float] = None
    iterations: Optional[int] = None
    average_window: Optional[int] = None
    record_trace: bool = False
    trace_stride: int = 1
    keep_estimates: bool = False

    def __post_init__(self):
        if self.mu is not None and not (np.isfinite(self.mu) and self.mu > 0):
            raise InvalidParameterError(f"Step size mu must be positive, got {self.mu}")
        if self.iterations is not None and self.iterations < 1:
            raise InvalidParameterError(f"Iteration count must be >= 1, got {self.iterations}")
        if self.average_window is not None and self.average_window < 1:
            raise InvalidParameterError(f"Averaging window must be >= 1, got {self.average_window}")
        if self.trace_stride < 1:
            raise InvalidParameterError(f"Trace stride must be >= 1, got {self.trace_stride}")


@dataclass
class TraceEntry:
    """One recorded point of a solver run."""

    k: int
    multiplications: int
    residual_cost: float
    error_norm: Optional[float] = None
    estimate: Optional[Vector] = None
    averaged: bool = False  # the final window average, not an iterate


@dataclass
class SolverRun:
    """Result of one estimator run."""

    method: Method
    estimate: Vector
    multiplications: int
    iterations: int
    trace: Optional[List[TraceEntry]] = None
    mu: Optional[float] = None
    average_window: Optional[int] = None

    def error_norms(self) -> List[float]:
        """Error norms of the recorded iterates (requires ground truth)."""
        if not self.trace:
            return []
        return [entry.error_norm for entry in self.trace
                if not entry.averaged and entry.error_norm is not None]

    def window_estimates(self) -> List[Vector]:
        """Recorded iterates that fall inside the averaging window."""
        if not self.trace or self.average_window is None:
            return []
        first = self.iterations - self.average_window + 1
        return [entry.estimate for entry in self.trace
                if not entry.averaged and entry.k >= first and entry.estimate is not None]


@dataclass
class SlsState:
    """State of the sequential least squares recursion."""

    estimate: Vector
    gain: Vector
    inverse_information: DenseMatrix


@dataclass
class CycleAnalysis:
    """Per-row iteration matrices, the cycle matrix and its stability verdict."""

    per_row_matrices: List[DenseMatrix]
    cycle_matrix: DenseMatrix
    spectral_norm: float
    stable: bool
    mu: float

    @property
    def m(self) -> int:
        return len(self.per_row_matrices)

    @property
    def p(self) -> int:
        return self.cycle_matrix.shape[0]


@dataclass
class ErrorDecomposition:
    """Split of the ALS iteration error into initial-condition and noise parts."""

    k: int
    e_total: Vector
    e_init: Vector
    e_noise: Vector


@dataclass
class AveragingSummary:
    """How much the final window average reduced the ALS error."""

    averaged_norm: float
    window_mean_norm: float
    window_max_norm: float

    @property
    def reduction_factor(self) -> float:
        """Mean window error norm over the averaged error norm."""
        if self.averaged_norm == 0.0:
            return float('inf')
        return self.window_mean_norm / self.averaged_norm


@dataclass(frozen=True)
class SineScenarioSpec:
    """Sinusoid amplitude-estimation scenario.

    Row n of H holds cos(2 pi n T_s f_k) for n = 1..m. Frequencies and true
    amplitudes are drawn from the seeded generator unless supplied.
    """

    m: int = 100
    p: int = 8
    sample_interval: float = 1.0
    frequencies: Optional[Tuple[float, ...]] = None
    sigma: float = 1e-2
    seed: int = 0
    x_true: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.m < self.p or self.p < 1:
            raise InvalidParameterError(f"Sine scenario needs m >= p >= 1, got {self.m}x{self.p}")
        if self.sample_interval <= 0:
            raise InvalidParameterError("Sample interval must be positive")
        if self.sigma < 0:
            raise InvalidParameterError("Noise standard deviation must be nonnegative")
        if self.frequencies is not None:
            if len(self.frequencies) != self.p:
                raise DimensionError(f"Expected {self.p} frequencies, got {len(self.frequencies)}")
            if len(set(self.frequencies)) != len(self.frequencies):
                raise InvalidParameterError("Frequencies must be distinct")
        if self.x_true is not None and len(self.x_true) != self.p:
            raise DimensionError(f"Expected {self.p} amplitudes, got {len(self.x_true)}")


@dataclass(frozen=True)
class RandomSweepSpec:
    """Protocol of the random-matrix degradation study."""

    dims: Tuple[Tuple[int, int], ...] = ((100, 1), (100, 10))
    sigmas: Tuple[float, ...] = NOISE_LEVELS
    matrices_per_sigma: int = 10
    vectors_per_matrix: int = 10
    seed: int = 0

    def __post_init__(self):
        if not self.dims or not self.sigmas:
            raise InvalidParameterError("Sweep needs at least one dimension and one noise level")
        for m, p in self.dims:
            if p < 1 or m < p:
                raise InvalidParameterError(f"Sweep dimension {m}x{p} violates m >= p >= 1")
        if any(sigma <= 0 for sigma in self.sigmas):
            raise InvalidParameterError("All noise levels must be positive")
        if self.matrices_per_sigma < 1 or self.vectors_per_matrix < 1:
            raise InvalidParameterError("Trial counts must be positive")

    @classmethod
    def desk_scale(cls, dims: Optional[Tuple[Tuple[int, int], ...]] = None,
                   seed: int = 0) -> "RandomSweepSpec":
        """10 matrices x 10 vectors per noise level."""
        return cls(dims=dims or ((100, 1), (100, 10)), seed=seed)

    @classmethod
    def full_scale(cls, dims: Optional[Tuple[Tuple[int, int], ...]] = None,
                   seed: int = 0) -> "RandomSweepSpec":
        """100 matrices x 100 vectors per noise level over every table shape."""
        return cls(dims=dims or TABLE_DIMS, matrices_per_sigma=100,
                   vectors_per_matrix=100, seed=seed)


@dataclass
class SweepCell:
    """Averaged error norms for one (dimension, noise level) pair."""

    m: int
    p: int
    sigma: float
    mean_err_als: float
    mean_err_ls: float
    trials: int
    diverged: int = 0
    mean_iterations: float = 0.0

    @property
    def ratio(self) -> float:
        return self.mean_err_als / self.mean_err_ls


@dataclass
class SweepReport:
    """Result of a degradation sweep."""

    cells: List[SweepCell] = field(default_factory=list)

    def r_max(self, m: int, p: int) -> float:
        """Largest relative increase of ALS' mean error over LS across noise levels."""
        ratios = [cell.ratio - 1.0 for cell in self.cells if (cell.m, cell.p) == (m, p)]
        if not ratios:
            raise KeyError(f"No sweep cells for dimension {m}x{p}")
        return max(ratios)

    def summary(self) -> Dict[Tuple[int, int], float]:
        """r_max per dimension, in first-seen order."""
        dims = list(dict.fromkeys((cell.m, cell.p) for cell in self.cells))
        return {dim: self.r_max(*dim) for dim in dims}

    @property
    def divergence_count(self) -> int:
        return sum(cell.diverged for cell in self.cells)


@dataclass
class TraceExperimentResult:
    """Traces of several estimators on one problem instance."""

    problem: ProblemInstance
    runs: Dict[Method, SolverRun] = field(default_factory=dict)

    def final_error(self, method: Method) -> Optional[float]:
        return self.problem.error_norm(self.runs[method].estimate)


class Command(str, Enum):
    """Workflows exposed by the command line."""

    SOLVE = "solve"
    ANALYZE = "analyze"
    TRACE = "trace"
    SWEEP = "sweep"


@dataclass
class RunManifest:
    """Fully resolved parameters of one command-line run.

    Unset ``methods`` selects the command default. Unset ``mu`` and
    ``iterations`` resolve to bound / step_divisor and the automatic policy.
    """

    command: Command
    matrix_path: Optional[str] = None
    vector_path: Optional[str] = None
    truth_path: Optional[str] = None
    methods: Optional[Tuple[Method, ...]] = None
    mu: Optional[float] = None
    step_divisor: float = DEFAULT_STEP_DIVISOR
    iterations: Optional[int] = None
    iteration_policy: str = "contraction"
    seed: int = 0
    output_dir: str = "."
    full_scale: bool = False
    dims: Optional[Tuple[Tuple[int, int], ...]] = None
    noise_free: bool = False
    sigma: float = 1e-2
    initial_scale: float = DEFAULT_SLS_INITIAL_SCALE
    workers: int = 1

    def __post_init__(self):
        if self.mu is not None and not self.mu > 0:
            raise InvalidParameterError(f"Step size mu must be positive, got {self.mu}")
        if self.step_divisor <= 1:
            raise InvalidParameterError("Step divisor must exceed 1 to stay inside the bound")
        if self.iterations is not None and self.iterations < 1:
            raise InvalidParameterError("Iteration count must be >= 1")
        if self.iteration_policy not in ("contraction", "onset"):
            raise InvalidParameterError(f"Unknown iteration policy: {self.iteration_policy}")
        if self.workers < 1:
            raise InvalidParameterError("Worker count must be >= 1")
        if self.methods is not None and not self.methods:
            raise InvalidParameterError("Method list is empty")
        if self.sigma < 0:
            raise InvalidParameterError(f"Noise standard deviation must be nonnegative, got {self.sigma}")

    @property
    def selected_methods(self) -> Tuple[Method, ...]:
        """Requested methods, or the command default (all iterative estimators for trace)."""
        if self.methods:
            return tuple(self.methods)
        if self.command == Command.TRACE:
            return (Method.ALS, Method.ILS, Method.SLS)
        return (Method.ALS,)
