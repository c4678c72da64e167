"""
Minimal statevector operations for the sampling circuits

Qubit q is bit q of the basis index (little-endian), so on the C-order
reshape to [2] * n it lives on axis n - 1 - q.
"""

from __future__ import annotations

import math

import numpy as np

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def apply_single_qubit(state: np.ndarray, matrix: np.ndarray, qubit: int, n: int) -> np.ndarray:
    axis = n - 1 - qubit
    tensor = np.moveaxis(state.reshape([2] * n), axis, -1)
    tensor = np.tensordot(tensor, matrix, axes=([-1], [1]))
    return np.moveaxis(tensor, -1, axis).reshape(-1)


def apply_hadamards(state: np.ndarray, qubits, n: int) -> np.ndarray:
    for q in qubits:
        state = apply_single_qubit(state, HADAMARD, q, n)
    return state


def apply_diagonal(state: np.ndarray, phases) -> np.ndarray:
    """Diagonal unitary |z> -> phases[z] |z>"""
    return state * np.asarray(phases)


def born_probabilities(state: np.ndarray) -> np.ndarray:
    probs = np.abs(state) ** 2
    return probs / probs.sum()
