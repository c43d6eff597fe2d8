"""
Report writer for the ALS toolkit.

This module writes the artifacts of a run: per-method trace CSVs, the sweep
detail and summary CSVs, stability and error-decomposition records,
estimate vectors and the INI metadata record. Every file is written to a
temporary sibling and renamed into place, and every float is rendered with
17 significant digits.
"""

import configparser
import csv
import io
import logging
import os
import tempfile
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from als.linalg.core import residual_cost
from als.models import (CycleAnalysis, ErrorDecomposition, Method, ProblemInstance, SolverRun,
                        SweepReport, TraceExperimentResult, Vector)
from als.parser.matrix_parser import format_matrix, format_number

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ['k', 'error_norm', 'residual_cost', 'cumulative_multiplications', 'averaged']
SWEEP_COLUMNS = ['dim_m', 'dim_p', 'sigma', 'mean_err_als', 'mean_err_ls', 'ratio',
                 'trials', 'diverged', 'mean_iterations']
SUMMARY_COLUMNS = ['dim_m', 'dim_p', 'r_max']
CYCLE_COLUMNS = ['m', 'p', 'mu', 'spectral_norm', 'stable']
DECOMPOSITION_COLUMNS = ['k', 'total_norm', 'init_norm', 'noise_norm']


def _cell(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format_number(value)


class ReportWriter:
    """Writes run artifacts into an output directory."""

    def __init__(self, output_dir: Optional[str] = None):
        """Initialize the report writer.

        Args:
            output_dir: Directory to write files to (default: current directory)
        """
        self.output_dir = output_dir
        if output_dir:
            os.makedirs(output_dir, exist_ok=True)

    def _get_output_path(self, output_file: str) -> str:
        """Get the full path for an output file.

        Args:
            output_file: Output file name or path

        Returns:
            Full path to the output file
        """
        if self.output_dir:
            return os.path.join(self.output_dir, output_file)
        return output_file

    def _write_atomic(self, output_file: str, content: str) -> str:
        path = self._get_output_path(output_file)
        directory = os.path.dirname(os.path.abspath(path))
        fd, temp_path = tempfile.mkstemp(dir=directory, prefix='.', suffix='.tmp')
        try:
            with os.fdopen(fd, 'w', newline='', encoding='utf-8') as f:
                f.write(content)
            os.replace(temp_path, path)
        except BaseException:
            if os.path.exists(temp_path):
                os.unlink(temp_path)
            raise
        logger.debug(f"Wrote {path}")
        return path

    def _write_csv(self, output_file: str, columns: Sequence[str],
                   rows: Iterable[Sequence]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
        return self._write_atomic(output_file, buffer.getvalue())

    def trace_rows(self, problem: ProblemInstance, run: SolverRun) -> List[List]:
        """Rows of a trace CSV; ALS gets its averaged estimate as a final flagged row."""
        rows = [[entry.k, entry.error_norm, entry.residual_cost, entry.multiplications, False]
                for entry in run.trace or []]
        if run.method == Method.ALS:
            rows.append([run.iterations, problem.error_norm(run.estimate),
                         residual_cost(problem, run.estimate), run.multiplications, True])
        elif run.method == Method.BATCH:
            rows.append([1, problem.error_norm(run.estimate),
                         residual_cost(problem, run.estimate), run.multiplications, False])
        return rows

    def write_trace(self, problem: ProblemInstance, run: SolverRun) -> str:
        """Write ``<method>_trace.csv``.

        Each row can be read against the iteration k or against the
        cumulative multiplication count.
        """
        return self._write_csv(f"{run.method.value}_trace.csv", TRACE_COLUMNS,
                               self.trace_rows(problem, run))

    def write_traces(self, result: TraceExperimentResult) -> Dict[Method, str]:
        return {method: self.write_trace(result.problem, run) for method, run in result.runs.items()}

    def write_sweep(self, report: SweepReport,
                    detail_file: str = 'sweep_detail.csv',
                    summary_file: str = 'sweep_summary.csv') -> List[str]:
        """Write one detail row per (dimension, sigma) and one r_max row per dimension."""
        detail = [[cell.m, cell.p, cell.sigma, cell.mean_err_als, cell.mean_err_ls, cell.ratio,
                   cell.trials, cell.diverged, cell.mean_iterations] for cell in report.cells]
        summary = [[m, p, r_max] for (m, p), r_max in report.summary().items()]
        return [self._write_csv(detail_file, SWEEP_COLUMNS, detail),
                self._write_csv(summary_file, SUMMARY_COLUMNS, summary)]

    def write_cycle_analysis(self, analyses: Sequence[CycleAnalysis],
                             output_file: str = 'stability.csv') -> str:
        rows = [[analysis.m, analysis.p, analysis.mu, analysis.spectral_norm, analysis.stable]
                for analysis in analyses]
        return self._write_csv(output_file, CYCLE_COLUMNS, rows)

    def write_decomposition(self, decompositions: Sequence[ErrorDecomposition],
                            output_file: str = 'decomposition.csv') -> str:
        rows = [[d.k, float(np.linalg.norm(d.e_total)), float(np.linalg.norm(d.e_init)),
                 float(np.linalg.norm(d.e_noise))] for d in decompositions]
        return self._write_csv(output_file, DECOMPOSITION_COLUMNS, rows)

    def write_estimate(self, estimate: Vector, output_file: str) -> str:
        """Write an estimate in the matrix text format as a p x 1 matrix."""
        return self._write_atomic(output_file, format_matrix(estimate))

    def write_metadata(self, run_entries: Mapping[str, str], result_entries: Mapping[str, object],
                       output_file: str = 'metadata.ini') -> str:
        """Write an INI record with a [run] and a [result] section.

        The [run] section is a valid manifest, so the record can be passed
        back with --config to replay the run.
        """
        config = configparser.ConfigParser()
        config['run'] = dict(run_entries)
        config['result'] = {key: _cell(value) for key, value in result_entries.items()}
        buffer = io.StringIO()
        config.write(buffer)
        return self._write_atomic(output_file, buffer.getvalue())
