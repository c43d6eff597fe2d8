"""
Tests for the ALS, ILS and batch solvers, step sizes and the cost model.
"""

import math
import unittest

import numpy as np

from als.errors import DegenerateRowError, DimensionError, DivergenceError, InvalidParameterError
from als.linalg import batch_ls_solve, residual_cost
from als.models import TABLE_DIMS, Method, ProblemInstance, SolverConfig
from als.solvers import (MultiplicationCounter, als_solve, als_step, batch_solve, cyclic_index,
                         ils_gradient, ils_solve, max_step_size_als, max_step_size_ils,
                         multiplication_count, resolve_iterations, resolve_step_size)
from als.solvers.batch import cholesky_solve_multiplications
from tests.oracles import random_dims, random_instance


class TestCyclicIndex(unittest.TestCase):
    """Tests for the cyclic row index."""

    def test_examples(self):
        self.assertEqual(cyclic_index(1, 100), 1)
        self.assertEqual(cyclic_index(100, 100), 100)
        self.assertEqual(cyclic_index(101, 100), 1)
        self.assertEqual([cyclic_index(k, 3) for k in range(1, 8)], [1, 2, 3, 1, 2, 3, 1])


class TestAlsStep(unittest.TestCase):
    """Tests for a single ALS update."""

    def test_zero_residual(self):
        np.testing.assert_array_equal(
            als_step(np.zeros(2), np.array([1.0, 0.0]), 0.0, 0.3), [0.0, 0.0])

    def test_direct_evaluation(self):
        np.testing.assert_array_equal(
            als_step(np.zeros(2), np.array([1.0, 0.0]), 1.0, 0.25), [0.5, 0.0])

    def test_scalar_fixed_point(self):
        x = np.zeros(1)
        for _ in range(60):
            x = als_step(x, np.array([1.0]), 2.0, 0.25)
        self.assertAlmostEqual(x[0], 2.0, places=12)

    def test_counts_and_shapes(self):
        counter = MultiplicationCounter()
        als_step(np.zeros(4), np.ones(4), 1.0, 0.1, counter)
        self.assertEqual(counter.total, 9)
        with self.assertRaises(DimensionError):
            als_step(np.zeros(3), np.ones(2), 1.0, 0.1)


class TestAlsSolve(unittest.TestCase):
    """Tests for the ALS solver."""

    def test_identity_instance(self):
        x_true = np.array([0.3, -1.2, 2.5])
        problem = ProblemInstance(H=np.eye(3), y=x_true, x_true=x_true)
        run = als_solve(problem, SolverConfig(mu=0.4, iterations=150))
        np.testing.assert_allclose(run.estimate, x_true, rtol=0, atol=1e-6)
        self.assertEqual(run.method, Method.ALS)
        self.assertEqual(run.average_window, 3)

    def test_noise_free_random_instance_reaches_batch(self):
        problem = random_instance(21, 20, 4)
        mu = max_step_size_als(problem.H) / 2.05
        run = als_solve(problem, SolverConfig(mu=mu, iterations=400 * 20))
        self.assertLessEqual(np.linalg.norm(run.estimate - batch_ls_solve(problem)), 1e-6)

    def test_default_iterations_reach_batch_on_random_instances(self):
        rng = np.random.default_rng(2024)
        dims = [random_dims(rng) for _ in range(49)] + [(78, 1)]
        for index, (m, p) in enumerate(dims):
            with self.subTest(m=m, p=p):
                problem = random_instance(500 + index, m, p)
                mu = max_step_size_als(problem.H) / 2.05
                run = als_solve(problem, SolverConfig(mu=mu))
                x_ls = batch_ls_solve(problem)
                self.assertLessEqual(float(np.linalg.norm(run.estimate - x_ls)),
                                     1e-6 * (1.0 + float(np.linalg.norm(x_ls))))

    def test_single_row_matches_ils(self):
        # one row: the ALS step and the ILS step are the same update with the
        # products grouped differently, (2 mu r) h against 2 mu (h r)
        problem = ProblemInstance(H=[[1.7]], y=[0.9])
        mu = max_step_size_als(problem.H) / 2.05
        for N in range(1, 41):
            als_run = als_solve(problem, SolverConfig(mu=mu, iterations=N, average_window=1))
            ils_run = ils_solve(problem, SolverConfig(mu=mu, iterations=N))
            np.testing.assert_allclose(als_run.estimate, ils_run.estimate, rtol=1e-14, atol=1e-15)

    def test_default_iterations_are_cycle_multiple(self):
        problem = random_instance(2, 12, 3, sigma=0.01)
        mu = resolve_step_size(problem.H, Method.ALS)
        run = als_solve(problem, SolverConfig(mu=mu))
        self.assertEqual(run.iterations % 12, 0)
        self.assertEqual(run.multiplications, multiplication_count(Method.ALS, 12, 3, run.iterations))

    def test_window_and_mu_validation(self):
        problem = random_instance(0, 10, 2)
        with self.assertRaises(InvalidParameterError):
            als_solve(problem, SolverConfig(mu=0.01, iterations=5))
        with self.assertRaises(InvalidParameterError):
            als_solve(problem, SolverConfig(iterations=50))
        run = als_solve(problem, SolverConfig(mu=0.01, iterations=5, average_window=1))
        self.assertEqual(run.iterations, 5)

    def test_divergence(self):
        problem = random_instance(5, 10, 3, sigma=0.1)
        with self.assertRaises(DivergenceError) as context:
            als_solve(problem, SolverConfig(mu=10.0, iterations=5000))
        self.assertGreater(context.exception.iteration, 1)
        self.assertEqual(context.exception.method, 'als')

    def test_trace_stride(self):
        problem = random_instance(1, 5, 2, sigma=0.1)
        run = als_solve(problem, SolverConfig(mu=0.05, iterations=95, record_trace=True,
                                              trace_stride=10))
        self.assertEqual([entry.k for entry in run.trace], [10, 20, 30, 40, 50, 60, 70, 80, 90, 95])
        self.assertTrue(all(entry.estimate is None for entry in run.trace))
        self.assertEqual(run.trace[-1].multiplications, (2 * 2 + 1) * 95)

    def test_onset_policy(self):
        problem = random_instance(6, 10, 2, sigma=0.05)
        mu = resolve_step_size(problem.H, Method.ALS)
        N = resolve_iterations(problem, mu, "onset")
        self.assertEqual(N % 10, 0)
        self.assertGreaterEqual(N, 10)
        with self.assertRaises(InvalidParameterError):
            resolve_iterations(problem, mu, "fixed")


class TestIlsSolve(unittest.TestCase):
    """Tests for the ILS solver."""

    def test_identity_instance(self):
        y = np.array([1.0, -2.0, 4.0])
        run = ils_solve(ProblemInstance(H=np.eye(3), y=y), SolverConfig(mu=0.25, iterations=100))
        np.testing.assert_allclose(run.estimate, y, rtol=0, atol=1e-6)

    def test_converges_to_batch(self):
        problem = random_instance(13, 20, 3, sigma=0.1)
        mu = max_step_size_ils(problem.H) / 2.05
        eigenvalues = np.linalg.eigvalsh(problem.H.T @ problem.H)
        rate = 1.0 - 2.0 * mu * eigenvalues[0]
        iterations = math.ceil(math.log(1e-12) / math.log(rate))
        run = ils_solve(problem, SolverConfig(mu=mu, iterations=iterations))
        np.testing.assert_allclose(run.estimate, batch_ls_solve(problem), rtol=0, atol=1e-8)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(9)
        step = 1e-6
        for seed in range(20):
            problem = random_instance(100 + seed, 8, 3, sigma=0.1)
            x_hat = rng.random(3) * 2.0 - 1.0
            gradient = ils_gradient(problem, x_hat)
            numeric = np.zeros(3)
            for j in range(3):
                delta = np.zeros(3)
                delta[j] = step
                numeric[j] = (residual_cost(problem, x_hat + delta)
                              - residual_cost(problem, x_hat - delta)) / (2.0 * step)
            self.assertLessEqual(np.linalg.norm(gradient - numeric), 1e-5 * np.linalg.norm(numeric))

    def test_divergence(self):
        problem = random_instance(5, 10, 3, sigma=0.1)
        with self.assertRaises(DivergenceError) as context:
            ils_solve(problem, SolverConfig(mu=10.0, iterations=5000))
        self.assertEqual(context.exception.method, 'ils')

    def test_bound_uses_dominant_singular_value(self):
        H = np.array([[2.0, -1.0], [-1.0, 2.0]])
        mu = max_step_size_ils(H) / 2.05
        self.assertAlmostEqual(mu * 2.05, 1.0 / 18.0, places=10)
        run = ils_solve(ProblemInstance(H=H, y=H @ np.array([1.0, 2.0])),
                        SolverConfig(mu=mu, iterations=2000))
        np.testing.assert_allclose(run.estimate, [1.0, 2.0], rtol=0, atol=1e-10)


class TestStepSize(unittest.TestCase):
    """Tests for the step-size bounds."""

    def test_als_bound(self):
        self.assertEqual(max_step_size_als(np.eye(3)), 0.5)
        self.assertEqual(max_step_size_als(np.array([[3.0, 4.0]])), 1.0 / 50.0)

    def test_zero_row(self):
        with self.assertRaises(DegenerateRowError) as context:
            max_step_size_als(np.array([[1.0, 0.0], [0.0, 0.0], [1.0, 1.0]]))
        self.assertEqual(context.exception.row, 2)

    def test_ils_bound(self):
        self.assertAlmostEqual(max_step_size_ils(np.eye(4)), 0.5, places=9)
        self.assertAlmostEqual(max_step_size_ils(np.diag([2.0, 1.0])), 0.125, places=9)

    def test_resolve(self):
        H = np.array([[3.0, 4.0], [1.0, 0.0]])
        self.assertEqual(resolve_step_size(H, Method.ALS), (1.0 / 50.0) / 2.05)
        self.assertEqual(resolve_step_size(H, Method.ALS, mu=0.3), 0.3)
        self.assertIsNone(resolve_step_size(H, Method.SLS))
        self.assertIsNone(resolve_step_size(H, Method.BATCH))
        with self.assertRaises(InvalidParameterError):
            resolve_step_size(H, Method.ILS, mu=0.0)


class TestCostModel(unittest.TestCase):
    """Tests for the closed-form multiplication counts."""

    def test_examples(self):
        self.assertEqual(multiplication_count(Method.ALS, 100, 8, 1, include_averaging=False), 17)
        self.assertEqual(multiplication_count(Method.ALS, 100, 8, 1), 25)
        self.assertEqual(multiplication_count(Method.ILS, 100, 8, 1), 1608)
        self.assertIsNone(multiplication_count(Method.SLS, 100, 8, 1))
        ratio = (multiplication_count(Method.ILS, 100, 50, 1)
                 / multiplication_count(Method.ALS, 100, 50, 1, include_averaging=False))
        self.assertAlmostEqual(ratio / 100.0, 1.0, places=1)

    def test_instrumented_counts_equal_closed_forms(self):
        for m, p in TABLE_DIMS:
            with self.subTest(m=m, p=p):
                problem = random_instance(m + p, m, p, sigma=0.1)
                als_run = als_solve(problem, SolverConfig(mu=max_step_size_als(problem.H) / 2.05,
                                                          iterations=m))
                self.assertEqual(als_run.multiplications,
                                 multiplication_count(Method.ALS, m, p, m))
                ils_run = ils_solve(problem, SolverConfig(mu=1e-6, iterations=3))
                self.assertEqual(ils_run.multiplications,
                                 multiplication_count(Method.ILS, m, p, 3))

    def test_counts_over_dimension_grid(self):
        for m in range(2, 21):
            for p in range(1, 6):
                if p > m:
                    continue
                problem = random_instance(100 * m + p, m, p, sigma=0.1)
                for N in range(1, 51):
                    with self.subTest(m=m, p=p, N=N):
                        als_run = als_solve(problem, SolverConfig(mu=1e-3, iterations=N,
                                                                  average_window=1))
                        self.assertEqual(als_run.multiplications, (2 * p + 1) * N + p)
                        self.assertEqual(als_run.multiplications,
                                         multiplication_count(Method.ALS, m, p, N))
                        ils_run = ils_solve(problem, SolverConfig(mu=1e-3, iterations=N))
                        self.assertEqual(ils_run.multiplications, (2 * p * m + p) * N)
                        self.assertEqual(ils_run.multiplications,
                                         multiplication_count(Method.ILS, m, p, N))

    def test_batch_solve(self):
        self.assertEqual(cholesky_solve_multiplications(1), 2)
        self.assertEqual(cholesky_solve_multiplications(2), 8)
        problem = random_instance(3, 10, 2, sigma=0.1)
        run = batch_solve(problem)
        np.testing.assert_array_equal(run.estimate, batch_ls_solve(problem))
        self.assertEqual(run.multiplications, 10 * 4 + 10 * 2 + 8)


if __name__ == '__main__':
    unittest.main()
