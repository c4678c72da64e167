"""
Doubly Distributed Fourier Sampling from a shared maximally entangled state
"""

from __future__ import annotations

import math

import numpy as np

from core_math.errors import CapacityError, ValidationError
from quantum_protocols.dfs import dfs_distribution
from quantum_protocols.instances import DfsInstance
from quantum_protocols.statevector import apply_diagonal, apply_hadamards, born_probabilities

MAX_STATEVECTOR_N = 4


def ddfs_joint_pmf(inst: DfsInstance) -> np.ndarray:
    """q(s, t) = p_fg(s xor t) / 2^n as a (2^n, 2^n) array indexed [s, t]"""
    size = inst.size
    p = dfs_distribution(inst).to_array(size)
    s = np.arange(size)[:, None]
    t = np.arange(size)[None, :]
    return p[s ^ t] / size


def ddfs_statevector_pmf(inst: DfsInstance) -> np.ndarray:
    """
    Joint law from the full 2n-qubit circuit; used as an oracle for `ddfs_joint_pmf`

    Alice holds qubits 0..n-1 and Bob n..2n-1 of sum_z |z>|z>/sqrt(N); each applies
    their phases and H on their own qubits, then both measure.

    Raises:
        CapacityError: for n above MAX_STATEVECTOR_N
    """
    n = inst.n
    if n > MAX_STATEVECTOR_N:
        raise CapacityError(f"2n-qubit simulation limited to n <= {MAX_STATEVECTOR_N}")
    size = inst.size
    z = np.arange(size)
    state = np.zeros(size * size, dtype=complex)
    state[z + size * z] = 1.0 / math.sqrt(size)
    alice = np.tile(inst.f.entries, size)
    bob = np.repeat(inst.g.entries, size)
    state = apply_diagonal(state, alice * bob)
    state = apply_hadamards(state, range(2 * n), 2 * n)
    # basis index a + N b reshapes to [b, a]
    return born_probabilities(state).reshape(size, size).T


def ddfs_quantum_sample(inst: DfsInstance, rng: np.random.Generator, shots: int) -> list[tuple[int, int]]:
    """
    Draw (s, t) pairs: u ~ p_fg, s uniform, t = s xor u

    Returns:
        list: `shots` pairs of integer-encoded strings
    """
    if shots < 1:
        raise ValidationError("shots must be at least 1")
    size = inst.size
    p = dfs_distribution(inst).to_array(size)
    u = rng.choice(size, size=shots, p=p / p.sum())
    s = rng.integers(0, size, size=shots)
    t = s ^ u
    return [(int(a), int(b)) for a, b in zip(s, t)]


def xor_pushforward(joint) -> np.ndarray:
    """Law of s xor t under a joint pmf indexed [s, t]"""
    joint = np.asarray(joint, dtype=float)
    size = joint.shape[0]
    out = np.zeros(size)
    s = np.arange(size)
    for u in range(size):
        out[u] = joint[s, s ^ u].sum()
    return out
