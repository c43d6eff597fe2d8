"""
Experiments module for the ALS toolkit.

This module provides the sinusoid and random-matrix problem generators, the
degradation sweep of ALS against batch least squares and the trace experiment
comparing the estimators by counted multiplications.
"""

from als.experiments.runner import (AlsConfigPolicy, DegradationSweep, TraceExperiment,
                                    ils_to_als_multiplication_ratio, multiplications_to_reach,
                                    run_degradation_sweep, run_trace_experiment)
from als.experiments.scenarios import (assemble_problem, default_frequencies, gaussian_noise,
                                       gen_random_problem, gen_sine_problem,
                                       random_observation_matrix, sine_observation_matrix)

__all__ = ['AlsConfigPolicy', 'DegradationSweep', 'TraceExperiment', 'assemble_problem',
           'default_frequencies', 'gaussian_noise', 'gen_random_problem', 'gen_sine_problem',
           'ils_to_als_multiplication_ratio', 'multiplications_to_reach', 'random_observation_matrix',
           'run_degradation_sweep', 'run_trace_experiment', 'sine_observation_matrix']
