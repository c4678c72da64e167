"""
Correlated sign-string distributions xi_p, the shift map, the padded law xi'_p,
and their exact overlap laws
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from core_math.analytic import log_binomial
from core_math.errors import DomainError, ValidationError

TECHBOUND_HYPOTHESIS_P = 0.01


@dataclass(frozen=True)
class XiParams:
    """xi_p on {-1,+1}^N x {-1,+1}^N: x uniform, y_i = x_i with probability (1+p)/2"""

    N: int
    p: float

    def __post_init__(self):
        if self.N < 1:
            raise DomainError("N must be at least 1")
        if not -1.0 <= self.p <= 1.0:
            raise DomainError(f"correlation p={self.p} outside [-1, 1]")

    @property
    def agreement(self) -> float:
        return (1.0 + self.p) / 2.0


def xi_sample_batch(N: int, p: float, size: int, rng: np.random.Generator):
    """`size` independent pairs from xi_p as two (size, N) int8 arrays"""
    params = XiParams(N, p)
    x = (1 - 2 * rng.integers(0, 2, size=(size, N))).astype(np.int8)
    flips = rng.random((size, N)) < (1.0 - params.agreement)
    y = np.where(flips, -x, x).astype(np.int8)
    return x, y


def xi_sample(params: XiParams, rng: np.random.Generator):
    """
    One pair (x, y) from xi_p

    Args:
        params: N and p
        rng: numpy Generator

    Returns:
        tuple: x and y as int8 arrays of length N
    """
    x, y = xi_sample_batch(params.N, params.p, 1, rng)
    return x[0], y[0]


def xi_overlap_pmf(N: int, p: float, delta: int) -> float:
    """
    Pr_{xi_p}[<x,y> = delta] = C(N, k) ((1+p)/2)^k ((1-p)/2)^{N-k}, k = (N+delta)/2

    Wrong-parity or out-of-range delta returns 0.
    """
    params = XiParams(N, p)
    if abs(delta) > N or (N + delta) % 2:
        return 0.0
    return float(binom.pmf((N + delta) // 2, N, params.agreement))


def overlap_pmf_vector(N: int, p: float) -> np.ndarray:
    """pmf of <x,y> under xi_p on the grid delta = -N..N (index N + delta)"""
    params = XiParams(N, p)
    out = np.zeros(2 * N + 1)
    k = np.arange(N + 1)
    out[2 * k] = binom.pmf(k, N, params.agreement)
    return out


def expected_squared_overlap(N: int, p: float) -> float:
    """E_{xi_p}[(<x,y>/N)^2] = 1/N + (1 - 1/N) p^2"""
    XiParams(N, p)
    return 1.0 / N + (1.0 - 1.0 / N) * p * p


def expected_squared_overlap_enumerated(N: int, p: float) -> float:
    """Same expectation summed against the exact overlap pmf"""
    deltas = np.arange(-N, N + 1)
    return float(np.sum((deltas / N) ** 2 * overlap_pmf_vector(N, p)))


def shift_correlation(p: float, q: float) -> float:
    """Correlation after re-drawing each pair as an equal pair with probability q"""
    return p + q - p * q


def shift_pairs(x, y, q: float, rng: np.random.Generator):
    """
    With probability q per coordinate, replace (x_i, y_i) by a uniformly random equal pair

    Maps xi_p to xi_{p+q-pq}. Works on single strings or (k, N) batches.
    """
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"shift probability q={q} outside [0, 1]")
    x = np.asarray(x)
    y = np.asarray(y)
    replace = rng.random(x.shape) < q
    fresh = (1 - 2 * rng.integers(0, 2, size=x.shape)).astype(x.dtype)
    return np.where(replace, fresh, x), np.where(replace, fresh, y)


def orthogonal_pad(N: int):
    """
    Fixed pad x'' = (+,+,-,-,...), y'' = (+,-,+,-,...) with <x'', y''> = 0

    Both strings are balanced, so every coordinate of the permuted pair stays
    uniform. Balanced strings agreeing on exactly N/2 positions exist only for 4 | N.
    """
    if N % 4:
        raise ValidationError(f"balanced orthogonal pad needs N divisible by 4, got {N}")
    x_pad = np.tile(np.array([1, 1, -1, -1], dtype=np.int8), N // 4)
    y_pad = np.tile(np.array([1, -1, 1, -1], dtype=np.int8), N // 4)
    return x_pad, y_pad


def xi_prime_sample_batch(N: int, p: float, size: int, rng: np.random.Generator):
    """
    `size` pairs from xi'_p: (x, y) ~ xi_p, concatenated with the orthogonal pad,
    then one shared uniform permutation of the 2N positions per pair
    """
    x_pad, y_pad = orthogonal_pad(N)
    x, y = xi_sample_batch(N, p, size, rng)
    x_full = np.concatenate([x, np.broadcast_to(x_pad, (size, N))], axis=1)
    y_full = np.concatenate([y, np.broadcast_to(y_pad, (size, N))], axis=1)
    perms = np.argsort(rng.random((size, 2 * N)), axis=1)
    return np.take_along_axis(x_full, perms, axis=1), np.take_along_axis(y_full, perms, axis=1)


def xi_prime_sample(N: int, p: float, rng: np.random.Generator):
    x, y = xi_prime_sample_batch(N, p, 1, rng)
    return x[0], y[0]


def xi_prime_overlap_pmf(N: int, p: float) -> np.ndarray:
    """
    pmf of <x', y'> under xi'_p on delta = -2N..2N

    The permutation is shared, so <x', y'> = <x, y> + <x'', y''>; the law is the
    xi_p overlap law convolved with the (point-mass) pad overlap law.
    """
    x_pad, y_pad = orthogonal_pad(N)
    pad = np.zeros(2 * N + 1)
    pad[N + int(np.dot(x_pad.astype(int), y_pad.astype(int)))] = 1.0
    return np.convolve(overlap_pmf_vector(N, p), pad)


def embed_overlap_pmf(N: int, p: float) -> np.ndarray:
    """xi_p overlap pmf placed on the wider grid -2N..2N"""
    out = np.zeros(4 * N + 1)
    out[N:3 * N + 1] = overlap_pmf_vector(N, p)
    return out


@dataclass(frozen=True)
class TechboundRatio:
    N: int
    p: float
    delta: int
    ratio: float
    in_hypothesis: bool


def _log_techbound_ratio(N: int, p: float, deltas: np.ndarray) -> np.ndarray:
    k = (N + deltas) // 2
    numerator = binom.logpmf(k, N, (1.0 + p) / 2.0)
    denominator = 2 * p * p * N + log_binomial(2 * N, N + deltas // 2) - 2 * N * math.log(2)
    return numerator - denominator


def techbound_ratio(N: int, p: float, delta: int) -> TechboundRatio:
    """
    Pr_{xi'_p}[<x',y'> = delta] / (e^{2 p^2 N} Pr_{xi_0^{2N}}[<x',y'> = delta])

    |p| > 0.01 is evaluated but flagged as outside the fact's hypothesis.

    Raises:
        ValidationError: if the denominator vanishes where the numerator does not
    """
    XiParams(N, p)
    if abs(delta) > N or (N + delta) % 2:
        return TechboundRatio(N, p, delta, 0.0, abs(p) <= TECHBOUND_HYPOTHESIS_P)
    if delta % 2:
        raise ValidationError(f"Pr_xi0^2N[{delta}] = 0 but the numerator is positive (odd N)")
    ratio = float(np.exp(_log_techbound_ratio(N, p, np.array([delta]))[0]))
    return TechboundRatio(N, p, delta, ratio, abs(p) <= TECHBOUND_HYPOTHESIS_P)


@dataclass(frozen=True)
class TechboundSweep:
    N: int
    p: float
    max_ratio: float
    argmax_delta: int
    in_hypothesis: bool


def techbound_sweep(N: int, p: float) -> TechboundSweep:
    """Maximum of `techbound_ratio` over all delta with the parity of N (N even)"""
    if N % 2:
        raise ValidationError("the ratio sweep needs even N")
    XiParams(N, p)
    deltas = np.arange(-N, N + 1, 2)
    logs = _log_techbound_ratio(N, p, deltas)
    best = int(np.argmax(logs))
    return TechboundSweep(N, p, float(np.exp(logs[best])), int(deltas[best]), abs(p) <= TECHBOUND_HYPOTHESIS_P)


def constant_stability(values) -> float:
    """Largest relative deviation of the values from their mean"""
    values = np.asarray(values, dtype=float)
    mean = values.mean()
    return float(np.max(np.abs(values - mean)) / mean)


def shifted_targets(N: int, b: float) -> dict:
    """
    Correlations after the shift with p = sqrt(b/N), q = p/(1+p), and the
    exact E[(<x',y'>/2N)^2] under each padded law

    xi_{-p} -> xi_0, xi_0 -> xi_{p/(1+p)}, xi_p -> xi_{2p/(1+p)}.
    """
    p = math.sqrt(b / N)
    if p > 1:
        raise DomainError(f"b={b} too large for N={N}")
    q = p / (1 + p)
    deltas = np.arange(-2 * N, 2 * N + 1)
    out = {"p": p, "q": q, "targets": []}
    for start in (-p, 0.0, p):
        r = shift_correlation(start, q)
        pmf = xi_prime_overlap_pmf(N, r) if N % 4 == 0 else embed_overlap_pmf(N, r)
        expectation = float(np.sum((deltas / (2 * N)) ** 2 * pmf))
        out["targets"].append({
            "start": start,
            "shifted": r,
            "expected_acceptance": expectation,
            "closed_form": expected_squared_overlap(N, r) / 4.0,
            "in_units_of_1_over_4N": expectation * 4 * N,
        })
    return out


@dataclass(frozen=True)
class ContradictionMargin:
    b: float
    s: float
    lower: float
    upper: float
    gap: float

    @property
    def holds(self) -> bool:
        return self.gap > 0


def contradiction_margin(b: float, s: float) -> ContradictionMargin:
    """
    Leading-order acceptance bounds in units of 1/N: p_0 >= (b+1)/4 against
    p_0 <= (3/16)(e^s + (4b+1) e^{-s}); a positive gap is the contradiction
    """
    lower = (b + 1) / 4
    upper = 3 / 16 * (math.exp(s) + (4 * b + 1) * math.exp(-s))
    return ContradictionMargin(b, s, lower, upper, lower - upper)
