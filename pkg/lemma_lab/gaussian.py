"""
Gaussian correlated pairs Xi_eta and the sign map onto xi_p
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from core_math.errors import DomainError, ValidationError
from protocol_framework.rectangles import MC_CHUNK, Measure, Rectangle, rect_measure_exact, sign_index


@dataclass(frozen=True)
class GaussianXiParams:
    N: int
    eta: float

    def __post_init__(self):
        if not -1.0 <= self.eta <= 1.0:
            raise DomainError(f"correlation eta={self.eta} outside [-1, 1]")
        if self.N < 1:
            raise DomainError("N must be at least 1")


def gaussian_xi_sample_batch(N: int, eta: float, size: int, rng: np.random.Generator):
    """y = eta x + sqrt(1 - eta^2) z with x, z independent standard Gaussian (size, N) arrays"""
    GaussianXiParams(N, eta)
    x = rng.standard_normal((size, N))
    z = rng.standard_normal((size, N))
    return x, eta * x + math.sqrt(1.0 - eta * eta) * z


def gaussian_xi_sample(params: GaussianXiParams, rng: np.random.Generator):
    x, y = gaussian_xi_sample_batch(params.N, params.eta, 1, rng)
    return x[0], y[0]


def signs(values) -> np.ndarray:
    """sgn with the measure-zero tie sent to +1"""
    return np.where(np.asarray(values) >= 0, 1, -1).astype(np.int8)


def sign_map(eta: float) -> float:
    """p = 1 - (2/pi) arccos(eta): the correlation of (sgn x, sgn y) under Xi_eta"""
    if not -1.0 <= eta <= 1.0:
        raise DomainError(f"correlation eta={eta} outside [-1, 1]")
    return 1.0 - 2.0 / math.pi * math.acos(eta)


@dataclass(frozen=True)
class SignMapCheck:
    eta: float
    p: float
    empirical_agreement: float
    expected_agreement: float
    stderr: float
    samples: int

    @property
    def holds(self) -> bool:
        return abs(self.empirical_agreement - self.expected_agreement) <= 3 * self.stderr


def sign_map_check(eta: float, N: int = 6, samples: int = 100_000,
                   rng: np.random.Generator | None = None) -> SignMapCheck:
    """
    Empirical per-coordinate sign agreement of Xi_eta against (1 + sign_map(eta))/2

    Args:
        eta: Gaussian correlation
        N: coordinates per sample
        samples: sample pairs
        rng: generator; without one only the exact map is returned

    Returns:
        SignMapCheck: the exact p and the binomial comparison
    """
    p = sign_map(eta)
    expected = (1.0 + p) / 2.0
    if rng is None:
        return SignMapCheck(eta, p, expected, expected, 0.0, 0)
    agree = 0
    remaining = samples
    while remaining > 0:
        chunk = min(remaining, MC_CHUNK)
        x, y = gaussian_xi_sample_batch(N, eta, chunk, rng)
        agree += int(np.count_nonzero(signs(x) == signs(y)))
        remaining -= chunk
    total = samples * N
    stderr = math.sqrt(expected * (1.0 - expected) / total)
    return SignMapCheck(eta, p, agree / total, expected, stderr, samples)


def gaussian_rectangle_measure(alice_mask, bob_mask, eta: float, samples: int,
                               rng: np.random.Generator) -> Measure:
    """
    Xi_eta measure of {(x, y) : sgn x in A, sgn y in B} for sign-pattern sets A, B

    Equals xi_p(A x B) with p = sign_map(eta).
    """
    alice_mask = np.asarray(alice_mask, dtype=bool)
    bob_mask = np.asarray(bob_mask, dtype=bool)
    if alice_mask.shape != bob_mask.shape:
        raise ValidationError("sign-pattern masks must cover the same cube")
    N = int(alice_mask.size).bit_length() - 1
    hits = 0
    remaining = samples
    while remaining > 0:
        chunk = min(remaining, MC_CHUNK)
        x, y = gaussian_xi_sample_batch(N, eta, chunk, rng)
        hits += int(np.count_nonzero(alice_mask[sign_index(signs(x))] & bob_mask[sign_index(signs(y))]))
        remaining -= chunk
    freq = hits / samples
    return Measure(freq, math.sqrt(freq * (1 - freq) / samples), "mc", samples)


def sign_rectangle_exact(alice_mask, bob_mask, eta: float) -> float:
    """The discrete side of `gaussian_rectangle_measure`: xi_{sign_map(eta)}(A x B)"""
    return rect_measure_exact(Rectangle.from_masks(alice_mask, bob_mask), sign_map(eta))
