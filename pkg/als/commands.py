"""
Workflows of the ALS toolkit.

This module provides the four workflows the command line and the MCP server
expose (solve, analyze, trace and sweep). Each takes a resolved RunManifest,
writes its artifacts through the ReportWriter and returns a CommandOutcome
with the exit code and a summary of the run.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from als.analysis.cycle import cycle_matrix
from als.analysis.recursion import replay_error_recursion
from als.errors import ExitCode, InvalidParameterError
from als.experiments.runner import (AlsConfigPolicy, DegradationSweep, TraceExperiment,
                                    ils_to_als_multiplication_ratio)
from als.experiments.scenarios import gen_sine_problem
from als.linalg.core import check_full_rank
from als.models import (Command, DenseMatrix, Method, ProblemInstance, RandomSweepSpec,
                        RunManifest, SineScenarioSpec, SolverConfig, SolverRun)
from als.parser.manifest_parser import manifest_entries
from als.parser.matrix_parser import MatrixTextParser
from als.report.writer import ReportWriter
from als.solvers.batch import batch_solve
from als.solvers.iterative import als_solve, ils_solve, resolve_iterations
from als.solvers.sequential import sls_solve
from als.solvers.step_size import max_step_size_als, max_step_size_ils, resolve_step_size

logger = logging.getLogger(__name__)


@dataclass
class CommandOutcome:
    """Exit code, summary values and written files of one workflow run."""

    exit_code: ExitCode
    summary: Dict[str, object] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)


class AlsRunner:
    """Runs the toolkit workflows for resolved manifests."""

    def __init__(self):
        """Initialize the runner."""
        self.parser = MatrixTextParser()
        self.commands: Dict[Command, Callable[[RunManifest], CommandOutcome]] = {
            Command.SOLVE: self.solve,
            Command.ANALYZE: self.analyze,
            Command.TRACE: self.trace,
            Command.SWEEP: self.sweep,
        }

    def run(self, manifest: RunManifest) -> CommandOutcome:
        """Dispatch a manifest to its workflow."""
        logger.info(f"Running {manifest.command.value} into {manifest.output_dir}")
        return self.commands[manifest.command](manifest)

    def load_matrix(self, manifest: RunManifest) -> DenseMatrix:
        if manifest.matrix_path is None:
            raise InvalidParameterError("A matrix file is required (--matrix)")
        return self.parser.parse_file(manifest.matrix_path)

    def load_problem(self, manifest: RunManifest) -> ProblemInstance:
        """Read H, y and the optional ground truth named by the manifest.

        Raises:
            InvalidParameterError: If a required path is missing
            FileNotFoundError: If an input file does not exist
            ParseError: If an input file is malformed
            DimensionError: If the shapes do not agree
            RankError: If H does not have full column rank
        """
        H = self.load_matrix(manifest)
        if manifest.vector_path is None:
            raise InvalidParameterError("A measurement vector file is required (--vector)")
        y = self.parser.parse_vector_file(manifest.vector_path)
        x_true = self.parser.parse_vector_file(manifest.truth_path) if manifest.truth_path else None
        problem = ProblemInstance(H=H, y=y, x_true=x_true)
        check_full_rank(problem.H)
        return problem

    @staticmethod
    def policy_for(manifest: RunManifest) -> AlsConfigPolicy:
        return AlsConfigPolicy(step_divisor=manifest.step_divisor, iterations=manifest.iterations,
                               iteration_policy=manifest.iteration_policy)

    def solver_config(self, problem: ProblemInstance, method: Method,
                      manifest: RunManifest) -> Optional[SolverConfig]:
        """Resolve mu and N for an iterative method; None for SLS and batch."""
        if method == Method.ALS:
            if manifest.mu is None:
                return self.policy_for(manifest).config_for(problem)
            policy = self.policy_for(manifest)
            N = manifest.iterations
            if N is None:
                N = resolve_iterations(problem, manifest.mu, policy.iteration_policy)
            return SolverConfig(mu=manifest.mu, iterations=N)
        if method == Method.ILS:
            mu = resolve_step_size(problem.H, Method.ILS, manifest.mu, manifest.step_divisor)
            return SolverConfig(mu=mu, iterations=manifest.iterations)
        return None

    def _solve_one(self, problem: ProblemInstance, method: Method,
                   manifest: RunManifest) -> SolverRun:
        if method == Method.BATCH:
            return batch_solve(problem)
        if method == Method.SLS:
            return sls_solve(problem, manifest.initial_scale)
        config = self.solver_config(problem, method, manifest)
        if method == Method.ALS:
            return als_solve(problem, config)
        return ils_solve(problem, config)

    def solve(self, manifest: RunManifest) -> CommandOutcome:
        """Estimate x from the input files with each requested method.

        Writes ``estimate_<method>.txt`` per method and ``metadata.ini``.
        """
        problem = self.load_problem(manifest)
        writer = ReportWriter(manifest.output_dir)
        outcome = CommandOutcome(ExitCode.OK, summary={'m': problem.m, 'p': problem.p})

        for method in manifest.selected_methods:
            started = time.perf_counter()
            run = self._solve_one(problem, method, manifest)
            elapsed = time.perf_counter() - started
            logger.info(f"{method.value}: N={run.iterations}, multiplications={run.multiplications}, "
                        f"{elapsed:.3f}s")
            outcome.outputs.append(writer.write_estimate(run.estimate, f"estimate_{method.value}.txt"))
            outcome.summary.update({
                f"{method.value}_mu": run.mu,
                f"{method.value}_iterations": run.iterations,
                f"{method.value}_multiplications": run.multiplications,
                f"{method.value}_wall_time": elapsed,
            })
            if problem.has_ground_truth:
                outcome.summary[f"{method.value}_error_norm"] = problem.error_norm(run.estimate)

        outcome.outputs.append(writer.write_metadata(manifest_entries(manifest), outcome.summary))
        return outcome

    def analyze(self, manifest: RunManifest) -> CommandOutcome:
        """Report the step-size bounds and the cycle-matrix norm of H.

        Writes ``stability.csv`` and ``metadata.ini``.
        """
        H = self.load_matrix(manifest)
        bound_als = max_step_size_als(H)
        bound_ils = max_step_size_ils(H)
        mu = resolve_step_size(H, Method.ALS, manifest.mu, manifest.step_divisor)
        analysis = cycle_matrix(H, mu)
        if not analysis.stable:
            logger.warning(f"||M||_2 = {analysis.spectral_norm:.6g} at mu={mu:.6g}: ALS does not contract")

        writer = ReportWriter(manifest.output_dir)
        summary = {
            'm': analysis.m,
            'p': analysis.p,
            'max_step_size_als': bound_als,
            'max_step_size_ils': bound_ils,
            'mu': mu,
            'spectral_norm': analysis.spectral_norm,
            'stable': analysis.stable,
        }
        outputs = [writer.write_cycle_analysis([analysis]),
                   writer.write_metadata(manifest_entries(manifest), summary)]
        return CommandOutcome(ExitCode.OK, summary, outputs)

    def trace_problem(self, manifest: RunManifest) -> ProblemInstance:
        """The fixture named by the manifest, else the seeded sinusoid scenario."""
        if manifest.matrix_path is not None:
            return self.load_problem(manifest)
        sigma = 0.0 if manifest.noise_free else manifest.sigma
        return gen_sine_problem(SineScenarioSpec(sigma=sigma, seed=manifest.seed))

    def trace(self, manifest: RunManifest) -> CommandOutcome:
        """Record error traces of the requested methods.

        Writes ``<method>_trace.csv`` per method, ``decomposition.csv`` when
        ALS runs on an instance with known noise, and ``metadata.ini``.
        """
        problem = self.trace_problem(manifest)
        methods = manifest.selected_methods
        configs = {}
        for method in (Method.ALS, Method.ILS):
            if method in methods and (manifest.mu is not None or manifest.iterations is not None):
                configs[method] = self.solver_config(problem, method, manifest)

        experiment = TraceExperiment(problem, self.policy_for(manifest), manifest.initial_scale)
        result = experiment.run(methods, configs)
        writer = ReportWriter(manifest.output_dir)
        outputs = list(writer.write_traces(result).values())

        summary: Dict[str, object] = {'m': problem.m, 'p': problem.p}
        for method, run in result.runs.items():
            summary[f"{method.value}_iterations"] = run.iterations
            summary[f"{method.value}_multiplications"] = run.multiplications
            summary[f"{method.value}_mu"] = run.mu
            summary[f"{method.value}_error_norm"] = result.final_error(method)

        if problem.has_ground_truth and Method.ALS in result.runs and Method.ILS in result.runs:
            summary['ils_als_multiplication_ratio'] = ils_to_als_multiplication_ratio(result)

        if problem.noise is not None and problem.x_true is not None and Method.ALS in result.runs:
            als_run = result.runs[Method.ALS]
            decompositions = replay_error_recursion(
                problem, SolverConfig(mu=als_run.mu, iterations=als_run.iterations))
            outputs.append(writer.write_decomposition(decompositions))

        outputs.append(writer.write_metadata(manifest_entries(manifest), summary))
        return CommandOutcome(ExitCode.OK, summary, outputs)

    def sweep(self, manifest: RunManifest) -> CommandOutcome:
        """Run the random-matrix degradation sweep.

        Writes ``sweep_detail.csv``, ``sweep_summary.csv`` and ``metadata.ini``.
        Divergent trials turn the exit code into SWEEP_DIVERGENCE.
        """
        factory = RandomSweepSpec.full_scale if manifest.full_scale else RandomSweepSpec.desk_scale
        spec = factory(dims=manifest.dims, seed=manifest.seed)
        report = DegradationSweep(spec, self.policy_for(manifest), manifest.workers).run()

        writer = ReportWriter(manifest.output_dir)
        summary: Dict[str, object] = {f"r_max_{m}x{p}": r_max for (m, p), r_max in report.summary().items()}
        summary['divergences'] = report.divergence_count
        outputs = writer.write_sweep(report)
        outputs.append(writer.write_metadata(manifest_entries(manifest), summary))

        exit_code = ExitCode.OK
        if report.divergence_count:
            logger.warning(f"{report.divergence_count} ALS trials diverged during the sweep")
            exit_code = ExitCode.SWEEP_DIVERGENCE
        return CommandOutcome(exit_code, summary, outputs)


def cmd_solve(manifest: RunManifest) -> CommandOutcome:
    return AlsRunner().solve(manifest)


def cmd_analyze(manifest: RunManifest) -> CommandOutcome:
    return AlsRunner().analyze(manifest)


def cmd_trace(manifest: RunManifest) -> CommandOutcome:
    return AlsRunner().trace(manifest)


def cmd_sweep(manifest: RunManifest) -> CommandOutcome:
    return AlsRunner().sweep(manifest)
