"""
Seeded random generators and the split rule for per-worker streams
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.default_rng(seed)


def split_rng(seed: int, count: int) -> list[np.random.Generator]:
    """
    Derive independent child generators from a master seed

    Child k is default_rng(SeedSequence(seed).spawn(count)[k]); the same
    (seed, count) always yields the same streams.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]


def child_seed(rng: np.random.Generator) -> int:
    """Draw a 63-bit seed from a generator, for handing to a sub-protocol"""
    return int(rng.integers(0, 2**63 - 1))
