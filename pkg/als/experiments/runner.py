"""
Experiment runners for the ALS toolkit.

This module provides the random-matrix degradation sweep, which compares the
mean error of ALS and batch least squares over many seeded instances, and the
trace experiment, which records the error of several estimators against
iterations and counted multiplications on a single instance.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from als.errors import DivergenceError, InvalidParameterError
from als.models import (DEFAULT_SLS_INITIAL_SCALE, DEFAULT_STEP_DIVISOR, Method, ProblemInstance,
                        RandomSweepSpec, SolverConfig, SolverRun, SweepCell, SweepReport,
                        TraceEntry, TraceExperimentResult)
from als.experiments.scenarios import assemble_problem, gaussian_noise, random_observation_matrix
from als.solvers.batch import batch_solve
from als.solvers.iterative import als_solve, ils_solve, resolve_iterations
from als.solvers.sequential import sls_solve
from als.solvers.step_size import resolve_step_size

logger = logging.getLogger(__name__)

# ILS runs until it has spent this many times the multiplications of ALS
ILS_BUDGET_FACTOR = 10


@dataclass(frozen=True)
class AlsConfigPolicy:
    """How ALS picks mu and N for an instance.

    mu is the row-norm bound divided by ``step_divisor``. N is ``iterations``
    when set, otherwise the result of ``iteration_policy``.
    """

    step_divisor: float = DEFAULT_STEP_DIVISOR
    iterations: Optional[int] = None
    iteration_policy: str = "contraction"

    def config_for(self, problem: ProblemInstance, **options) -> SolverConfig:
        mu = resolve_step_size(problem.H, Method.ALS, divisor=self.step_divisor)
        N = self.iterations
        if N is None:
            N = resolve_iterations(problem, mu, self.iteration_policy)
        return SolverConfig(mu=mu, iterations=N, **options)

    @property
    def depends_on_measurements(self) -> bool:
        """Whether N must be recomputed for every measurement vector."""
        return self.iterations is None and self.iteration_policy == "onset"


def multiplications_to_reach(trace: Sequence[TraceEntry], level: float) -> Optional[int]:
    """First cumulative multiplication count at which the error drops to ``level``.

    Returns None when the trace never gets there.
    """
    for entry in trace:
        if entry.averaged or entry.error_norm is None:
            continue
        if entry.error_norm <= level:
            return entry.multiplications
    return None


@dataclass(frozen=True)
class MatrixTrials:
    """All trials that share one observation matrix."""

    m: int
    p: int
    seed: int
    matrix_index: int
    vectors: int
    sigmas: Tuple[float, ...]
    policy: AlsConfigPolicy


@dataclass
class TrialOutcome:
    als_error: Optional[float]  # None when ALS diverged
    ls_error: float
    iterations: int


def run_matrix_trials(task: MatrixTrials) -> List[List[TrialOutcome]]:
    """Run every (vector, sigma) trial of one matrix.

    The matrix stream is seeded with (seed, m, p, matrix_index) and each
    vector stream with the vector index appended. The same x_true and unit
    noise z are reused at every sigma with noise sigma * z, so the levels are
    compared on matched draws.

    Returns:
        One list of outcomes per sigma, in vector order
    """
    matrix_rng = np.random.default_rng((task.seed, task.m, task.p, task.matrix_index))
    H = random_observation_matrix(task.m, task.p, matrix_rng)
    outcomes: List[List[TrialOutcome]] = [[] for _ in task.sigmas]
    shared_config: Optional[SolverConfig] = None

    for vector_index in range(task.vectors):
        vector_rng = np.random.default_rng(
            (task.seed, task.m, task.p, task.matrix_index, vector_index))
        x_true = vector_rng.random(task.p)
        unit_noise = gaussian_noise(vector_rng, task.m)

        for sigma_index, sigma in enumerate(task.sigmas):
            problem = assemble_problem(H, x_true, sigma * unit_noise)
            if task.policy.depends_on_measurements:
                config = task.policy.config_for(problem)
            else:
                if shared_config is None:
                    shared_config = task.policy.config_for(problem)
                config = shared_config

            ls_error = problem.error_norm(batch_solve(problem).estimate)
            try:
                als_error = problem.error_norm(als_solve(problem, config).estimate)
            except DivergenceError as e:
                logger.warning(f"Trial {task.m}x{task.p} matrix {task.matrix_index} "
                               f"vector {vector_index} sigma={sigma:g}: {e}")
                als_error = None
            outcomes[sigma_index].append(TrialOutcome(als_error, ls_error, config.iterations))

    logger.debug(f"Finished {task.vectors} vectors x {len(task.sigmas)} noise levels "
                 f"for {task.m}x{task.p} matrix {task.matrix_index}")
    return outcomes


class DegradationSweep:
    """Monte-Carlo comparison of ALS against batch least squares."""

    def __init__(self, spec: RandomSweepSpec, policy: Optional[AlsConfigPolicy] = None,
                 workers: int = 1):
        """Initialize the sweep.

        Args:
            spec: Dimensions, noise levels and trial counts
            policy: Step size and iteration policy for ALS
            workers: Number of processes; 1 runs in the calling process
        """
        if workers < 1:
            raise InvalidParameterError(f"Worker count must be >= 1, got {workers}")
        self.spec = spec
        self.policy = policy or AlsConfigPolicy()
        self.workers = workers

    def _tasks(self, m: int, p: int) -> List[MatrixTrials]:
        return [MatrixTrials(m=m, p=p, seed=self.spec.seed, matrix_index=index,
                             vectors=self.spec.vectors_per_matrix,
                             sigmas=tuple(self.spec.sigmas), policy=self.policy)
                for index in range(self.spec.matrices_per_sigma)]

    def _map(self, tasks: List[MatrixTrials]) -> List[List[List[TrialOutcome]]]:
        if self.workers == 1:
            return [run_matrix_trials(task) for task in tasks]
        with ProcessPoolExecutor(max_workers=self.workers) as executor:
            return list(executor.map(run_matrix_trials, tasks))

    @staticmethod
    def _fold(m: int, p: int, sigma: float, outcomes: Iterable[TrialOutcome]) -> SweepCell:
        outcomes = list(outcomes)
        converged = [outcome.als_error for outcome in outcomes if outcome.als_error is not None]
        diverged = len(outcomes) - len(converged)
        mean_als = math.fsum(converged) / len(converged) if converged else float('nan')
        mean_ls = math.fsum(outcome.ls_error for outcome in outcomes) / len(outcomes)
        mean_iterations = math.fsum(outcome.iterations for outcome in outcomes) / len(outcomes)
        return SweepCell(m=m, p=p, sigma=sigma, mean_err_als=mean_als, mean_err_ls=mean_ls,
                         trials=len(outcomes), diverged=diverged, mean_iterations=mean_iterations)

    def run(self) -> SweepReport:
        """Run every dimension and noise level of the spec.

        Divergent ALS trials are counted per cell and left out of its ALS mean.
        """
        report = SweepReport()
        for m, p in self.spec.dims:
            logger.info(f"Sweeping {m}x{p}: {self.spec.matrices_per_sigma} matrices x "
                        f"{self.spec.vectors_per_matrix} vectors, {len(self.spec.sigmas)} noise levels")
            per_matrix = self._map(self._tasks(m, p))
            for sigma_index, sigma in enumerate(self.spec.sigmas):
                cell = self._fold(m, p, sigma, (outcome for matrix in per_matrix
                                                for outcome in matrix[sigma_index]))
                logger.info(f"{m}x{p} sigma={sigma:g}: mean ALS {cell.mean_err_als:.4g}, "
                            f"mean LS {cell.mean_err_ls:.4g}, ratio {cell.ratio:.4f}")
                if cell.diverged:
                    logger.warning(f"{cell.diverged} of {cell.trials} ALS trials diverged "
                                   f"for {m}x{p} at sigma={sigma:g}")
                report.cells.append(cell)
            logger.info(f"{m}x{p}: r_max = {100.0 * report.r_max(m, p):.2f}%")
        return report


def run_degradation_sweep(spec: RandomSweepSpec, als_config_policy: Optional[AlsConfigPolicy] = None,
                          workers: int = 1) -> SweepReport:
    return DegradationSweep(spec, als_config_policy, workers).run()


class TraceExperiment:
    """Traces of several estimators on one problem instance."""

    def __init__(self, problem: ProblemInstance, policy: Optional[AlsConfigPolicy] = None,
                 initial_scale: float = DEFAULT_SLS_INITIAL_SCALE, trace_stride: int = 1):
        """Initialize the experiment.

        Args:
            problem: Instance to trace; error norms need x_true
            policy: Step size and iteration policy for ALS
            initial_scale: Initial P scale of SLS
            trace_stride: Record every ``trace_stride``-th iterate of ALS and ILS
        """
        self.problem = problem
        self.policy = policy or AlsConfigPolicy()
        self.initial_scale = initial_scale
        self.trace_stride = trace_stride

    def default_config(self, method: Method,
                       als_run: Optional[SolverRun] = None) -> Optional[SolverConfig]:
        """Configuration used for ``method`` when the caller supplies none.

        ILS gets the ILS bound divided by the policy divisor and enough
        iterations to spend ILS_BUDGET_FACTOR times the multiplications of
        ``als_run``.
        """
        if method == Method.ALS:
            return self.policy.config_for(self.problem)
        if method == Method.ILS:
            mu = resolve_step_size(self.problem.H, Method.ILS, divisor=self.policy.step_divisor)
            if als_run is None:
                return SolverConfig(mu=mu)
            per_iteration = 2 * self.problem.p * self.problem.m + self.problem.p
            iterations = max(1, math.ceil(ILS_BUDGET_FACTOR * als_run.multiplications / per_iteration))
            return SolverConfig(mu=mu, iterations=iterations)
        return None

    def run(self, methods: Iterable[Method],
            configs: Optional[Mapping[Method, SolverConfig]] = None) -> TraceExperimentResult:
        """Run each requested estimator with trace recording.

        ALS runs first so the ILS budget can follow its cost.
        """
        configs = dict(configs or {})
        requested = list(dict.fromkeys(methods))
        order = sorted(requested, key=lambda method: method != Method.ALS)
        result = TraceExperimentResult(problem=self.problem)

        for method in order:
            config = configs.get(method) or self.default_config(method, result.runs.get(Method.ALS))
            run = self._run_method(method, config)
            logger.info(f"{method.value}: {run.iterations} iterations, "
                        f"{run.multiplications} multiplications, final error {result.problem.error_norm(run.estimate)}")
            result.runs[method] = run

        result.runs = {method: result.runs[method] for method in requested}
        return result

    def _run_method(self, method: Method, config: Optional[SolverConfig]) -> SolverRun:
        if method == Method.BATCH:
            return batch_solve(self.problem)
        traced = replace(config or SolverConfig(), record_trace=True)
        if method == Method.SLS:
            return sls_solve(self.problem, self.initial_scale, replace(traced, trace_stride=1))
        traced = replace(traced, trace_stride=self.trace_stride)
        if method == Method.ALS:
            return als_solve(self.problem, traced)
        return ils_solve(self.problem, traced)


def run_trace_experiment(problem: ProblemInstance, methods: Iterable[Method],
                         configs: Optional[Mapping[Method, SolverConfig]] = None,
                         policy: Optional[AlsConfigPolicy] = None) -> TraceExperimentResult:
    return TraceExperiment(problem, policy).run(methods, configs)


def ils_to_als_multiplication_ratio(result: TraceExperimentResult) -> float:
    """Multiplications ILS needs to reach ALS' final error, over ALS' total count.

    Returns infinity when ILS never reaches that error within its trace.
    """
    if Method.ALS not in result.runs or Method.ILS not in result.runs:
        raise InvalidParameterError("Ratio needs both an ALS and an ILS run")
    als_run = result.runs[Method.ALS]
    level = result.final_error(Method.ALS)
    if level is None:
        raise InvalidParameterError("Ratio needs a problem with ground truth")
    reached = multiplications_to_reach(result.runs[Method.ILS].trace or [], level)
    if reached is None:
        return float('inf')
    return reached / als_run.multiplications
