"""
Problem generators for the experiments.

All randomness flows from numpy Generators created from explicit seeds.
Gaussian noise is produced with the Box-Muller transform from the
generator's uniform stream: z = sqrt(-2 ln(1 - u1)) cos(2 pi u2), one pair
of uniforms per sample, u1 drawn for all samples before u2.
"""

import logging
import math
from typing import Tuple

import numpy as np

from als.errors import GenerationError
from als.linalg.core import is_full_rank
from als.models import DenseMatrix, ProblemInstance, SineScenarioSpec, Vector

logger = logging.getLogger(__name__)

ASSEMBLY_TOLERANCE = 1e-12
MAX_GENERATION_RETRIES = 10
MAX_FREQUENCY_DRAWS = 100000


def gaussian_noise(rng: np.random.Generator, size: int) -> Vector:
    """Standard normal samples via Box-Muller from ``rng``'s uniforms."""
    u1 = rng.random(size)
    u2 = rng.random(size)
    return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * math.pi * u2)


def assemble_problem(H: DenseMatrix, x_true: Vector, noise: Vector) -> ProblemInstance:
    """Build y = H x + n and re-check the assembly."""
    problem = ProblemInstance(H=H, y=H @ x_true + noise, x_true=x_true, noise=noise)
    rebuilt = problem.H @ problem.x_true + problem.noise
    scale = 1.0 + float(np.max(np.abs(problem.y)))
    if float(np.max(np.abs(rebuilt - problem.y))) > ASSEMBLY_TOLERANCE * scale:
        raise GenerationError("Assembled measurements do not satisfy y = H x + n")
    return problem


def default_frequencies(p: int, m: int, sample_interval: float,
                        rng: np.random.Generator) -> Tuple[float, ...]:
    """Draw p frequencies uniformly in (0, 1 / (2 T_s)), pairwise at least 1 / (4 m T_s) apart."""
    nyquist = 1.0 / (2.0 * sample_interval)
    separation = 1.0 / (4.0 * m * sample_interval)
    frequencies = []
    for _ in range(MAX_FREQUENCY_DRAWS):
        candidate = float(rng.uniform(0.0, nyquist))
        if candidate == 0.0:
            continue
        if all(abs(candidate - f) >= separation for f in frequencies):
            frequencies.append(candidate)
            if len(frequencies) == p:
                return tuple(sorted(frequencies))
    raise GenerationError(f"Could not place {p} frequencies {separation:.3g} apart below {nyquist:.3g}")


def sine_observation_matrix(m: int, frequencies: Tuple[float, ...],
                            sample_interval: float) -> DenseMatrix:
    """H[n-1, k] = cos(2 pi n T_s f_k) for n = 1..m."""
    times = np.arange(1, m + 1) * sample_interval
    return np.cos(2.0 * math.pi * np.outer(times, np.asarray(frequencies, dtype=np.float64)))


def gen_sine_problem(spec: SineScenarioSpec) -> ProblemInstance:
    """Sinusoid amplitude-estimation instance.

    Frequencies, then amplitudes (uniform in [0, 1)), then noise are drawn
    from a generator seeded with ``spec.seed``; supplied values skip their draw.
    """
    rng = np.random.default_rng(spec.seed)
    frequencies = spec.frequencies or default_frequencies(spec.p, spec.m, spec.sample_interval, rng)
    H = sine_observation_matrix(spec.m, frequencies, spec.sample_interval)
    if not is_full_rank(H):
        logger.warning(f"Sine observation matrix is rank deficient (degenerate columns) "
                       f"for frequencies {frequencies}")

    x_true = np.asarray(spec.x_true, dtype=np.float64) if spec.x_true is not None else rng.random(spec.p)
    noise = spec.sigma * gaussian_noise(rng, spec.m)
    return assemble_problem(H, x_true, noise)


def random_observation_matrix(m: int, p: int, rng: np.random.Generator,
                              max_retries: int = MAX_GENERATION_RETRIES) -> DenseMatrix:
    """Uniform [0, 1) entries, redrawn while the matrix is rank deficient.

    Raises:
        GenerationError: If no full-rank matrix appears within ``max_retries`` redraws
    """
    for attempt in range(max_retries + 1):
        H = rng.random((m, p))
        if is_full_rank(H):
            return H
        logger.debug(f"Random {m}x{p} matrix rank deficient, redraw {attempt + 1}")
    raise GenerationError(f"No full-rank {m}x{p} matrix after {max_retries} redraws")


def gen_random_problem(m: int, p: int, sigma: float, rng: np.random.Generator,
                       max_retries: int = MAX_GENERATION_RETRIES) -> ProblemInstance:
    """Uniform H and x_true in [0, 1), Gaussian noise with standard deviation sigma."""
    H = random_observation_matrix(m, p, rng, max_retries)
    x_true = rng.random(p)
    noise = sigma * gaussian_noise(rng, m)
    return assemble_problem(H, x_true, noise)
