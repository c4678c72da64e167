"""
Distributed Quantum Sampling: measuring Alice's state with Bob's POVM
"""

from __future__ import annotations

import numpy as np

from core_math.errors import ValidationError
from core_math.types import OutcomeDistribution, PureState
from quantum_protocols.instances import DqsInstance

IMAG_TOL = 1e-10


def povm_probabilities(psi: PureState, operators) -> np.ndarray:
    """<psi|E_j|psi> for each operator; the imaginary parts must vanish"""
    amps = psi.amplitudes
    values = np.array([np.vdot(amps, op @ amps) for op in operators])
    if np.max(np.abs(values.imag)) > IMAG_TOL:
        raise ValidationError("POVM expectation has a non-negligible imaginary part")
    return values.real


def dqs_distribution(inst: DqsInstance) -> OutcomeDistribution:
    """p_j = <psi|E_j|psi> over the outcomes of M"""
    return OutcomeDistribution.from_array(povm_probabilities(inst.psi, inst.m.operators))


def dqs_sample(inst: DqsInstance, rng: np.random.Generator, shots: int) -> np.ndarray:
    return dqs_distribution(inst).sample(rng, shots)
