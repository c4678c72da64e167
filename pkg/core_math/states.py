"""
Haar-random states, unitaries, projectors and POVMs
"""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from core_math.errors import DimensionError, DomainError
from core_math.types import Measurement, PureState


def haar_batch(dimension: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    `count` Haar-random unit vectors as rows of a (count, dimension) array

    Complex Gaussian entries, then each row normalized; the law is unitarily invariant.
    """
    if dimension < 1:
        raise DimensionError("dimension must be at least 1")
    raw = rng.standard_normal((count, dimension)) + 1j * rng.standard_normal((count, dimension))
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def haar_random_state(dimension: int, rng: np.random.Generator) -> PureState:
    """
    Sample a pure state from the Haar measure on the unit sphere of C^N

    Args:
        dimension: N >= 1
        rng: numpy Generator

    Returns:
        PureState: unit-norm state
    """
    return PureState(haar_batch(dimension, 1, rng)[0])


def haar_unitary(dimension: int, rng: np.random.Generator) -> np.ndarray:
    if dimension == 1:
        return np.exp(2j * np.pi * rng.random()) * np.eye(1, dtype=np.complex128)
    return unitary_group.rvs(dimension, random_state=rng)


def random_projector(dimension: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    """Projector onto a Haar-random rank-r subspace"""
    if not 0 <= rank <= dimension:
        raise DomainError(f"rank {rank} outside [0, {dimension}]")
    basis = haar_unitary(dimension, rng)[:, :rank]
    return basis @ basis.conj().T


def haar_projective_measurement(dimension: int, rank: int, rng: np.random.Generator) -> Measurement:
    """Two-outcome {M, I-M} with M a Haar-rotated rank-r projector"""
    return Measurement.projector_pair(random_projector(dimension, rank, rng))


def random_povm(dimension: int, outcomes: int, rng: np.random.Generator) -> Measurement:
    """
    Random POVM with `outcomes` elements

    E_j = S^{-1/2} G_j S^{-1/2} with G_j = A_j A_j^dagger Wishart and S = sum_j G_j.
    """
    grams = []
    for _ in range(outcomes):
        a = rng.standard_normal((dimension, dimension)) + 1j * rng.standard_normal((dimension, dimension))
        grams.append(a @ a.conj().T)
    total = sum(grams)
    evals, evecs = np.linalg.eigh(total)
    inv_sqrt = evecs @ np.diag(evals ** -0.5) @ evecs.conj().T
    ops = []
    for g in grams:
        e = inv_sqrt @ g @ inv_sqrt
        ops.append((e + e.conj().T) / 2)
    # absorb rounding so the elements sum to I exactly up to float error
    ops[-1] = ops[-1] + (np.eye(dimension) - sum(ops))
    return Measurement(tuple(ops))
