"""
Tests for the report writer.
"""

import configparser
import csv
import os
import shutil
import tempfile
import unittest
from unittest import mock

import numpy as np

from als.analysis.cycle import cycle_matrix
from als.models import (Command, ErrorDecomposition, Method, RunManifest, SolverConfig,
                        SweepCell, SweepReport, TraceExperimentResult)
from als.parser.manifest_parser import ManifestParser, build_manifest, manifest_entries
from als.report.writer import TRACE_COLUMNS, ReportWriter
from als.solvers import als_solve, batch_solve
from tests.oracles import random_instance


def read_rows(path):
    with open(path, newline='') as f:
        return list(csv.reader(f))


class TestReportWriter(unittest.TestCase):
    """Tests for the ReportWriter class."""

    def setUp(self):
        """Set up test fixtures."""
        self.temp_dir = tempfile.mkdtemp()
        self.writer = ReportWriter(self.temp_dir)
        self.problem = random_instance(3, 6, 2, sigma=0.01)

    def tearDown(self):
        """Tear down test fixtures."""
        shutil.rmtree(self.temp_dir)

    def test_creates_output_directory(self):
        nested = os.path.join(self.temp_dir, 'a', 'b')
        ReportWriter(nested)
        self.assertTrue(os.path.isdir(nested))

    def test_als_trace_has_flagged_average_row(self):
        run = als_solve(self.problem, SolverConfig(mu=0.05, iterations=12, record_trace=True))
        path = self.writer.write_trace(self.problem, run)
        self.assertEqual(os.path.basename(path), 'als_trace.csv')

        rows = read_rows(path)
        self.assertEqual(rows[0], TRACE_COLUMNS)
        self.assertEqual(len(rows), 1 + 12 + 1)
        self.assertEqual([row[4] for row in rows[1:-1]], ['false'] * 12)
        self.assertEqual(rows[-1][0], '12')
        self.assertEqual(rows[-1][4], 'true')
        self.assertEqual(int(rows[-1][3]), run.multiplications)
        self.assertEqual(float(rows[-1][1]), self.problem.error_norm(run.estimate))

    def test_numbers_round_trip(self):
        run = als_solve(self.problem, SolverConfig(mu=0.05, iterations=6, record_trace=True))
        rows = read_rows(self.writer.write_trace(self.problem, run))
        for row, entry in zip(rows[1:], run.trace):
            self.assertEqual(float(row[1]), entry.error_norm)
            self.assertEqual(float(row[2]), entry.residual_cost)
            self.assertEqual(int(row[3]), entry.multiplications)

    def test_batch_trace_single_row(self):
        rows = read_rows(self.writer.write_trace(self.problem, batch_solve(self.problem)))
        self.assertEqual(len(rows), 2)
        self.assertEqual(rows[1][0], '1')

    def test_write_traces_names_files_by_method(self):
        result = TraceExperimentResult(problem=self.problem)
        result.runs[Method.BATCH] = batch_solve(self.problem)
        paths = self.writer.write_traces(result)
        self.assertEqual(set(paths), {Method.BATCH})
        self.assertTrue(paths[Method.BATCH].endswith('batch_trace.csv'))

    def test_sweep_files(self):
        report = SweepReport(cells=[
            SweepCell(m=100, p=1, sigma=1e-2, mean_err_als=1.1, mean_err_ls=1.0, trials=4),
            SweepCell(m=100, p=1, sigma=1e-1, mean_err_als=1.05, mean_err_ls=1.0, trials=4, diverged=1),
        ])
        detail, summary = self.writer.write_sweep(report)
        detail_rows = read_rows(detail)
        self.assertEqual(detail_rows[0][:3], ['dim_m', 'dim_p', 'sigma'])
        self.assertEqual(len(detail_rows), 3)
        self.assertEqual(detail_rows[2][7], '1')

        summary_rows = read_rows(summary)
        self.assertEqual(summary_rows[0], ['dim_m', 'dim_p', 'r_max'])
        self.assertEqual(len(summary_rows), 2)
        self.assertAlmostEqual(float(summary_rows[1][2]), 0.1, places=12)

    def test_cycle_analysis_and_decomposition(self):
        analysis = cycle_matrix(np.eye(2), 0.25)
        rows = read_rows(self.writer.write_cycle_analysis([analysis]))
        self.assertEqual(rows[1][:3], ['2', '2', '0.25'])
        self.assertAlmostEqual(float(rows[1][3]), 0.5, places=12)
        self.assertEqual(rows[1][4], 'true')

        decompositions = [ErrorDecomposition(k=1, e_total=np.array([3.0, 4.0]),
                                             e_init=np.array([3.0, 0.0]), e_noise=np.array([0.0, 4.0]))]
        rows = read_rows(self.writer.write_decomposition(decompositions))
        self.assertEqual(rows[1], ['1', '5', '3', '4'])

    def test_estimate_in_matrix_format(self):
        path = self.writer.write_estimate(np.array([0.5, 2.0]), 'estimate_als.txt')
        with open(path) as f:
            self.assertEqual(f.read(), "2 1\n0.5\n2\n")

    def test_metadata_replays_as_manifest(self):
        manifest = build_manifest(Command.SOLVE, {'methods': (Method.ALS,), 'mu': 0.125, 'iterations': 40,
                                                  'output_dir': self.temp_dir}, environ={})
        path = self.writer.write_metadata(manifest_entries(manifest), {'als_mu': 0.125, 'stable': True})

        config = configparser.ConfigParser()
        config.read(path)
        self.assertEqual(config['result']['stable'], 'true')
        self.assertEqual(config['result']['als_mu'], '0.125')

        replayed = RunManifest(command=Command.SOLVE, **ManifestParser().parse_file(path))
        self.assertEqual(replayed, manifest)

    def test_failed_write_leaves_no_file(self):
        with mock.patch('als.report.writer.os.replace', side_effect=OSError("disk full")):
            with self.assertRaises(OSError):
                self.writer.write_estimate(np.array([1.0]), 'estimate_als.txt')
        self.assertEqual(os.listdir(self.temp_dir), [])


if __name__ == '__main__':
    unittest.main()
