"""
Haar-state concentration behind the codebook protocol: random-projection tails
and the law of the overlap between two Haar states
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest, kstest

from core_math.errors import DomainError
from core_math.states import haar_batch

HAAR_CHUNK = 2**14
KS_LIMIT = 0.01
# two-sided binomial p-value matching a 3-sigma normal band
TAIL_PVALUE = 0.0027
TAIL_THRESHOLDS = tuple(round(0.1 * k, 1) for k in range(1, 10))


def projection_tail_bound(r: int, delta: float) -> float:
    """exp(-r delta^2 / 3) for delta <= 1, exp(-r delta / 3) beyond"""
    if delta <= 1:
        return math.exp(-r * delta * delta / 3)
    return math.exp(-r * delta / 3)


@dataclass(frozen=True)
class TailCheck:
    N: int
    r: int
    delta: float
    empirical_tail: float
    bound: float
    stderr: float
    trials: int

    @property
    def holds(self) -> bool:
        return self.empirical_tail <= self.bound + 3 * self.stderr


def randomproj_tail_check(N: int, r: int, delta: float, trials: int, rng: np.random.Generator) -> TailCheck:
    """
    Pr[<psi|P|psi> >= (1 + delta) r/N] for Haar psi and a fixed rank-r projector

    P projects onto the first r coordinates; by unitary invariance any rank-r
    projector gives the same law.
    """
    if not 1 <= r <= N:
        raise DomainError(f"rank r={r} outside [1, {N}]")
    if delta < 0:
        raise DomainError("delta must be non-negative")
    level = (1 + delta) * r / N
    hits = 0
    remaining = trials
    while remaining > 0:
        chunk = min(remaining, HAAR_CHUNK)
        states = haar_batch(N, chunk, rng)
        weight = np.sum(np.abs(states[:, :r]) ** 2, axis=1)
        hits += int(np.count_nonzero(weight >= level))
        remaining -= chunk
    bound = projection_tail_bound(r, delta)
    stderr = math.sqrt(bound * (1 - bound) / trials)
    return TailCheck(N, r, delta, hits / trials, bound, stderr, trials)


@dataclass(frozen=True)
class OverlapLawCheck:
    N: int
    samples: int
    ks_statistic: float
    ks_pvalue: float
    tails: tuple

    @property
    def holds(self) -> bool:
        return self.ks_statistic < KS_LIMIT and all(t["holds"] for t in self.tails)


def overlap_cdf(N: int):
    """CDF of |<phi|psi>|^2 for independent Haar states in C^N: 1 - (1 - x)^{N-1}"""
    def cdf(x):
        return 1.0 - (1.0 - np.clip(x, 0.0, 1.0)) ** (N - 1)
    return cdf


def overlap_law_check(N: int, samples: int, rng: np.random.Generator) -> OverlapLawCheck:
    """
    Kolmogorov-Smirnov distance of sampled squared overlaps from 1 - (1-x)^{N-1},
    plus an exact binomial test of the tail frequency at each fixed threshold
    """
    if N < 2:
        raise DomainError("overlap law needs N >= 2")
    values = []
    remaining = samples
    while remaining > 0:
        chunk = min(remaining, HAAR_CHUNK)
        phi = haar_batch(N, chunk, rng)
        psi = haar_batch(N, chunk, rng)
        values.append(np.abs(np.sum(np.conj(phi) * psi, axis=1)) ** 2)
        remaining -= chunk
    overlaps = np.concatenate(values)
    result = kstest(overlaps, overlap_cdf(N))
    tails = []
    for t in TAIL_THRESHOLDS:
        expected = (1.0 - t) ** (N - 1)
        hits = int(np.count_nonzero(overlaps >= t))
        pvalue = float(binomtest(hits, samples, expected).pvalue)
        tails.append({"threshold": t, "empirical": hits / samples, "expected": expected,
                      "pvalue": pvalue, "holds": pvalue >= TAIL_PVALUE})
    return OverlapLawCheck(N, samples, float(result.statistic), float(result.pvalue), tuple(tails))
