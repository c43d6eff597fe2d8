"""
Tests for the convergence analysis: iteration matrices, onset detection and averaging.
"""

import unittest

import numpy as np

from als.analysis import (averaged_error, averaging_summary, cycle_matrix,
                          default_iteration_count, detect_periodic_onset, row_iteration_matrix)
from als.errors import InvalidParameterError, TraceTooShortError
from als.models import SolverConfig
from als.solvers import als_solve, max_step_size_als
from tests.oracles import jacobi_eigenvalues, jacobi_singular_values, random_instance


class TestIterationMatrices(unittest.TestCase):
    """Tests for the per-row and cycle matrices."""

    def test_row_matrix_examples(self):
        np.testing.assert_array_equal(row_iteration_matrix(np.array([1.0]), 0.25), [[0.5]])
        np.testing.assert_array_equal(row_iteration_matrix(np.array([1.0, 0.0]), 0.25),
                                      [[0.5, 0.0], [0.0, 1.0]])
        np.testing.assert_allclose(row_iteration_matrix(np.array([2.0, -1.0]), 1e-300), np.eye(2))
        with self.assertRaises(InvalidParameterError):
            row_iteration_matrix(np.array([1.0]), 0.0)

    def test_row_matrix_eigenvalues(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            h = rng.random(4) - 0.5
            mu = 0.3 / float(h @ h)
            eigenvalues = jacobi_eigenvalues(row_iteration_matrix(h, mu))
            expected = sorted([1.0, 1.0, 1.0, 1.0 - 2.0 * mu * float(h @ h)])
            np.testing.assert_allclose(eigenvalues, expected, rtol=0, atol=1e-10)

    def test_scalar_cycle(self):
        analysis = cycle_matrix(np.array([[1.0]]), 0.25)
        np.testing.assert_array_equal(analysis.cycle_matrix, [[0.5]])
        self.assertAlmostEqual(analysis.spectral_norm, 0.5, places=12)
        self.assertTrue(analysis.stable)
        self.assertEqual((analysis.m, analysis.p), (1, 1))

    def test_identity_rows(self):
        analysis = cycle_matrix(np.eye(3), 0.25)
        np.testing.assert_allclose(analysis.cycle_matrix, 0.5 * np.eye(3), rtol=0, atol=1e-15)
        self.assertAlmostEqual(analysis.spectral_norm, 0.5, places=10)

    def test_orthogonal_unit_rows_annihilate(self):
        analysis = cycle_matrix(np.eye(3)[[2, 0, 1]], 0.5)
        np.testing.assert_array_equal(analysis.cycle_matrix, np.zeros((3, 3)))
        self.assertEqual(analysis.spectral_norm, 0.0)
        Q = np.linalg.qr(np.random.default_rng(4).standard_normal((3, 3)))[0]
        np.testing.assert_allclose(cycle_matrix(Q, 0.5).cycle_matrix, np.zeros((3, 3)),
                                   rtol=0, atol=1e-12)

    def test_product_order(self):
        H = np.array([[1.0, 0.0], [1.0, 1.0]]) / np.sqrt([[1.0], [2.0]])
        analysis = cycle_matrix(H, 0.2)
        M1, M2 = analysis.per_row_matrices
        np.testing.assert_allclose(analysis.cycle_matrix, M2 @ M1, rtol=0, atol=1e-15)
        self.assertGreater(np.max(np.abs(M2 @ M1 - M1 @ M2)), 1e-3)

    def test_stable_below_bound(self):
        rng = np.random.default_rng(2)
        for index in range(100):
            H = rng.random((10, 3))
            bound = max_step_size_als(H)
            for fraction in (0.1, 0.5, 0.99):
                with self.subTest(index=index, fraction=fraction):
                    analysis = cycle_matrix(H, bound * fraction)
                    self.assertLess(analysis.spectral_norm, 1.0)
                    self.assertTrue(analysis.stable)

    def test_spectral_norm_matches_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            H = rng.random((6, 3))
            analysis = cycle_matrix(H, max_step_size_als(H) / 2.05)
            expected = jacobi_singular_values(analysis.cycle_matrix)[0]
            self.assertAlmostEqual(analysis.spectral_norm / expected, 1.0, places=7)

    def test_default_iteration_count(self):
        H = np.eye(2)
        # ||M|| = 0.5: 27 cycles reach 0.5 ** 27 < 1e-8, then one more cycle for the averaging window
        self.assertEqual(default_iteration_count(H, 0.25), 28 * 2)
        self.assertEqual(default_iteration_count(H, 0.25, target=0.3), 3 * 2)
        self.assertEqual(default_iteration_count(H, 1e-9, max_cycles=40), 41 * 2)
        self.assertEqual(default_iteration_count(np.eye(3), 0.5), 6)

    def test_default_iteration_count_covers_window(self):
        H = np.eye(2)
        self.assertEqual(default_iteration_count(H, 0.25, average_window=1), 28 * 2)
        self.assertEqual(default_iteration_count(H, 0.25, average_window=5), 30 * 2)
        with self.assertRaises(InvalidParameterError):
            default_iteration_count(H, 0.25, average_window=0)

    def test_rank_deficient_cycle_is_not_contracting(self):
        H = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
        analysis = cycle_matrix(H, max_step_size_als(H) / 2.05)
        # the direction [1, -1] is untouched by every row
        self.assertAlmostEqual(analysis.spectral_norm, 1.0, places=9)
        self.assertFalse(analysis.stable)

    def test_default_iteration_fallback(self):
        # mu at twice the bound: ||M|| = 1
        self.assertEqual(default_iteration_count(np.eye(2), 1.0, fallback_cycles=7), 14)


class TestPeriodicOnset(unittest.TestCase):
    """Tests for the periodic onset detector."""

    def test_decaying_ramp_then_period(self):
        m = 4
        ramp = list(10.0 * 0.5 ** np.arange(10))
        period = [1.0, 2.0, 3.0, 4.0]
        trace = ramp + period * 6
        # the ramp is 10 entries long, so the first clean cycle starts at 12
        self.assertEqual(detect_periodic_onset(trace, m), 12)

    def test_converged_trace(self):
        trace = [1.0, 0.1, 0.01] + [1e-16] * 12
        self.assertEqual(detect_periodic_onset(trace, 3), 3)

    def test_never_periodic(self):
        trace = list(np.arange(1.0, 31.0))
        self.assertEqual(detect_periodic_onset(trace, 5), 30)

    def test_too_short(self):
        with self.assertRaises(TraceTooShortError):
            detect_periodic_onset([1.0] * 8, 3)

    def test_noisy_als_trace(self):
        problem = random_instance(12, 20, 3, sigma=0.05)
        mu = max_step_size_als(problem.H) / 2.05
        N = default_iteration_count(problem.H, mu)
        run = als_solve(problem, SolverConfig(mu=mu, iterations=N, record_trace=True))
        onset = detect_periodic_onset(run.error_norms(), 20)
        self.assertLess(onset, N)
        self.assertEqual(onset % 20, 0)
        tail = np.array(run.error_norms()[onset:])
        self.assertGreater(float(tail.max() - tail.min()), 0.0)


class TestAveraging(unittest.TestCase):
    """Tests for the window average."""

    def test_constant_window(self):
        x_true = np.array([1.0, 2.0])
        v = np.array([1.5, 1.0])
        np.testing.assert_array_equal(averaged_error([v, v, v], x_true), v - x_true)

    def test_antipodal_errors_cancel(self):
        x_true = np.array([1.0, 2.0])
        u = np.array([0.25, -0.5])
        np.testing.assert_array_equal(averaged_error([x_true + u, x_true - u], x_true), [0.0, 0.0])

    def test_empty_window(self):
        with self.assertRaises(InvalidParameterError):
            averaged_error([], np.zeros(2))

    def test_averaged_estimate_error_identity(self):
        for seed in range(5):
            problem = random_instance(30 + seed, 15, 3, sigma=0.1)
            mu = max_step_size_als(problem.H) / 2.05
            run = als_solve(problem, SolverConfig(mu=mu, iterations=600, record_trace=True,
                                                  keep_estimates=True))
            window = run.window_estimates()
            self.assertEqual(len(window), 15)
            e_avg = averaged_error(window, problem.x_true)
            np.testing.assert_allclose(run.estimate - problem.x_true, e_avg, rtol=0, atol=1e-12)

            summary = averaging_summary(run, problem.x_true)
            self.assertLessEqual(summary.averaged_norm, summary.window_max_norm + 1e-12)
            self.assertGreater(summary.reduction_factor, 0.0)

    def test_summary_needs_full_window(self):
        problem = random_instance(3, 10, 2, sigma=0.1)
        run = als_solve(problem, SolverConfig(mu=0.05, iterations=100, record_trace=True))
        with self.assertRaises(InvalidParameterError):
            averaging_summary(run, problem.x_true)


if __name__ == '__main__':
    unittest.main()
