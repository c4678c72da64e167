"""
Distributed Fourier Sampling: the exact law p_fg and its quantum simulation
"""

from __future__ import annotations

import logging
import math

import numpy as np

from core_math.distributions import l1_distance
from core_math.errors import ValidationError
from core_math.types import OutcomeDistribution, SignVector
from core_math.walsh import dot_parity, walsh_hadamard
from quantum_protocols.instances import DfsInstance
from quantum_protocols.statevector import apply_diagonal, apply_hadamards, born_probabilities

logger = logging.getLogger(__name__)

PIPELINE_TOL = 1e-10


def dfs_distribution(inst: DfsInstance) -> OutcomeDistribution:
    """
    p_fg(s) = ((1/2^n) sum_x (-1)^{s.x} f(x) g(x))^2

    Args:
        inst: the pair (f, g)

    Returns:
        OutcomeDistribution: over s in [0, 2^n)
    """
    coefficients = walsh_hadamard(inst.f * inst.g)
    return OutcomeDistribution.from_array(coefficients**2)


def dfs_distribution_naive(inst: DfsInstance) -> np.ndarray:
    """Direct double sum over (s, x); oracle for `dfs_distribution`"""
    size = inst.size
    h = inst.f.entries.astype(float) * inst.g.entries.astype(float)
    out = np.zeros(size)
    for s in range(size):
        total = sum((-1) ** int(dot_parity(s, x)) * h[x] for x in range(size))
        out[s] = (total / size) ** 2
    return out


def dfs_statevector_pmf(inst: DfsInstance) -> np.ndarray:
    """Alice prepares sum_x f(x)|x>/sqrt(N); Bob applies the g phases, H on every qubit, then measures"""
    n = inst.n
    state = inst.f.entries.astype(complex) / math.sqrt(inst.size)
    state = apply_diagonal(state, inst.g.entries)
    state = apply_hadamards(state, range(n), n)
    return born_probabilities(state)


def dfs_quantum_simulate(inst: DfsInstance, rng: np.random.Generator, shots: int) -> OutcomeDistribution:
    """
    Sample the statevector pipeline `shots` times

    The pipeline pmf is compared with the closed form before sampling.

    Raises:
        ValidationError: if shots < 1 or the two computations disagree
    """
    if shots < 1:
        raise ValidationError("shots must be at least 1")
    pmf = dfs_statevector_pmf(inst)
    exact = dfs_distribution(inst)
    gap = l1_distance(OutcomeDistribution.from_array(pmf), exact)
    if gap > PIPELINE_TOL:
        raise ValidationError(f"statevector pmf differs from the closed form by {gap:.3e}")
    samples = rng.choice(inst.size, size=shots, p=pmf)
    logger.debug("dfs n=%d: %d shots", inst.n, shots)
    return OutcomeDistribution.from_samples(samples, inst.size)


def relabel_for_target(x: SignVector, s: int) -> SignVector:
    """x^(s)_z = (-1)^{s.z} x_z, so that p_{x^(s) y}(0) = p_{x y}(s)"""
    signs = 1 - 2 * dot_parity(s, np.arange(len(x)))
    return SignVector(x.entries * signs)


def sampler_to_acceptance(sampler_pmf: OutcomeDistribution, s: int) -> float:
    """Accept iff the sampled string equals s; acceptance probability is the sampler's mass at s"""
    return sampler_pmf.get(s)


def target_acceptance(x: SignVector, y: SignVector, s: int) -> float:
    """(<x^(s), y>/N)^2, the exact acceptance of the target-s test"""
    return (relabel_for_target(x, s).inner_product(y) / len(x)) ** 2
