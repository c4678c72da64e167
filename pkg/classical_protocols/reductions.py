"""
DDFS to DFS: Alice forwards s and Bob outputs s xor t
"""

from __future__ import annotations

import numpy as np

from core_math.errors import ValidationError
from protocol_framework.runs import ALICE, ProtocolRun
from quantum_protocols.ddfs import xor_pushforward


def ddfs_to_dfs_reduction(pair: tuple[int, int], n: int, run: ProtocolRun | None = None):
    """
    Turn one DDFS output pair into a DFS sample

    Args:
        pair: (s, t) from a DDFS protocol
        n: string length; Alice's s costs n extra bits
        run: run of the DDFS protocol to charge, or None for a fresh one

    Returns:
        tuple: (u = s xor t, ProtocolRun)
    """
    s, t = pair
    size = 2**n
    if not (0 <= s < size and 0 <= t < size):
        raise ValidationError(f"pair {pair} is not a pair of {n}-bit strings")
    run = run if run is not None else ProtocolRun(protocol="ddfs-to-dfs")
    run.send_string(ALICE, s, n)
    run.output = s ^ t
    return s ^ t, run


def reduced_law(joint) -> np.ndarray:
    """Output law of the reduction for any DDFS joint pmf [s, t]"""
    return xor_pushforward(joint)


def perturb_joint(joint, eps: float, rng: np.random.Generator) -> np.ndarray:
    """Mix the joint pmf with a random pmf so the l1 distance is at most eps"""
    joint = np.asarray(joint, dtype=float)
    noise = rng.random(joint.shape)
    noise /= noise.sum()
    weight = eps / 2
    return (1 - weight) * joint + weight * noise
