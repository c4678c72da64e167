"""
Scalar analytic helpers: binary entropy and binomial-coefficient bounds
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import entr, gammaln

from core_math.errors import DomainError

MAX_BINOMIAL_N = 1000
LOG_SLACK = 1e-12


def binary_entropy(x):
    """
    h(x) = -x ln x - (1-x) ln(1-x), in nats

    Endpoints return 0 by continuity. Accepts scalars or arrays.

    Raises:
        DomainError: if any x lies outside [0, 1]
    """
    arr = np.asarray(x, dtype=float)
    if np.any((arr < 0) | (arr > 1)) or np.any(np.isnan(arr)):
        raise DomainError("binary entropy is defined on [0, 1]")
    value = entr(arr) + entr(1.0 - arr)
    return float(value) if value.ndim == 0 else value


def log_binomial(n, k):
    """ln C(n, k) via log-gamma"""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


@dataclass(frozen=True)
class BinomialBoundCheck:
    N: int
    k: int
    lower: float
    exact: float
    upper: float
    holds: bool


def check_binomial_bounds(N: int, k: int) -> BinomialBoundCheck:
    """
    Evaluate sqrt(N/(8k(N-k))) e^{N h(k/N)} <= C(N,k) <= sqrt(N/(2 pi k(N-k))) e^{N h(k/N)}

    The comparison is done in log-space; the returned values are exponentiated.

    Args:
        N: size, at most MAX_BINOMIAL_N
        k: integer in [1, N-1]

    Returns:
        BinomialBoundCheck: the three values and whether the sandwich holds
    """
    if N > MAX_BINOMIAL_N:
        raise DomainError(f"N={N} exceeds {MAX_BINOMIAL_N}")
    if not 1 <= k <= N - 1:
        raise DomainError(f"k={k} outside [1, N-1] for N={N}")
    entropy_term = N * binary_entropy(k / N)
    log_lower = 0.5 * math.log(N / (8 * k * (N - k))) + entropy_term
    log_upper = 0.5 * math.log(N / (2 * math.pi * k * (N - k))) + entropy_term
    log_exact = math.log(math.comb(N, k))
    # N=2, k=1 meets the lower bound with equality
    holds = log_lower <= log_exact + LOG_SLACK and log_exact <= log_upper + LOG_SLACK
    return BinomialBoundCheck(
        N=N,
        k=k,
        lower=math.exp(log_lower),
        exact=float(math.comb(N, k)),
        upper=math.exp(log_upper),
        holds=holds,
    )
