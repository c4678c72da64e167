"""
Closed-form calculus checks: the entropy function F, and exact Rademacher-sum
quantities behind the deterministic query lower bound
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from core_math.analytic import binary_entropy
from core_math.errors import CapacityError, DomainError

FD_TOL = 1e-6
BOUND_SLACK = 1e-12
MAX_RADEMACHER_M = 256


def f_function(x):
    """F(x) = ln 2 + h(x + 1/2) - 2 h(x/2 + 1/2), entropies in nats"""
    x = np.asarray(x, dtype=float)
    value = math.log(2) + binary_entropy(x + 0.5) - 2 * binary_entropy(x / 2 + 0.5)
    return float(value) if np.ndim(value) == 0 else value


def f_second_closed(x):
    """F''(x) = -(2 + 4x^2) / (1 - 5x^2 + 4x^4)"""
    x = np.asarray(x, dtype=float)
    return -(2 + 4 * x**2) / (1 - 5 * x**2 + 4 * x**4)


def f_second_numeric(x):
    """Central second difference with one Richardson step; h shrinks near the pole at 1/2"""
    x = np.asarray(x, dtype=float)
    h = np.minimum(1e-3, (0.5 - x) / 50)

    def central(step):
        return (f_function(x + step) - 2 * f_function(x) + f_function(x - step)) / step**2

    value = (4 * central(h / 2) - central(h)) / 3
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class FFunctionCheck:
    x: float
    F: float
    F_second: float
    F_second_numeric: float
    derivative_matches: bool
    bound_holds: bool
    boundary: bool

    def to_record(self) -> dict:
        return {
            "x": self.x,
            "F": self.F,
            "F_second": self.F_second,
            "F_second_numeric": self.F_second_numeric,
            "derivative_matches": self.derivative_matches,
            "bound_holds": self.bound_holds,
            "boundary": self.boundary,
        }


def f_function_checks(x: float) -> FFunctionCheck:
    """
    Evaluate F, its closed-form second derivative and the claim F(x) <= -x^2, F'' < -2

    At x = 0 the strict F'' bound is met with equality; the record is flagged as boundary.

    Raises:
        DomainError: for x outside [0, 1/2)
    """
    if not 0 <= x < 0.5:
        raise DomainError(f"x={x} outside [0, 1/2)")
    F = f_function(x)
    second = float(f_second_closed(x))
    numeric = f_second_numeric(x)
    matches = bool(np.isclose(numeric, second, rtol=FD_TOL, atol=FD_TOL))
    holds = F <= -x * x + BOUND_SLACK and second < -2
    return FFunctionCheck(float(x), F, second, float(numeric), matches, bool(holds), x == 0)


def f_function_grid(step: float = 1e-4, upper: float = 0.499) -> dict:
    """Sweep (0, upper]; counts bound and derivative failures"""
    grid = np.arange(1, int(round(upper / step)) + 1) * step
    F = f_function(grid)
    second = f_second_closed(grid)
    bound_failures = int(np.count_nonzero((F > -grid**2 + BOUND_SLACK) | (second >= -2)))
    numeric = f_second_numeric(grid)
    derivative_failures = int(np.count_nonzero(~np.isclose(numeric, second, rtol=FD_TOL, atol=FD_TOL)))
    return {"points": int(grid.size), "bound_failures": bound_failures, "derivative_failures": derivative_failures}


def _rademacher_pmf(m: int) -> list[tuple[int, Fraction]]:
    """Exact law of S_m = z_1 + ... + z_m as (value, probability) pairs"""
    if m < 0:
        raise DomainError("m must be non-negative")
    if m > MAX_RADEMACHER_M:
        raise CapacityError(f"m={m} exceeds {MAX_RADEMACHER_M}")
    denom = 2**m
    return [(m - 2 * k, Fraction(math.comb(m, k), denom)) for k in range(m + 1)]


def appendixB_min_abs_error_exact(m: int) -> Fraction:
    """
    min_q E|q - S_m^2|, attained at any median of S_m^2

    Returns:
        Fraction: the exact minimum
    """
    law: dict[int, Fraction] = {}
    for value, prob in _rademacher_pmf(m):
        law[value * value] = law.get(value * value, Fraction(0)) + prob
    cumulative = Fraction(0)
    median = 0
    for value in sorted(law):
        cumulative += law[value]
        if cumulative >= Fraction(1, 2):
            median = value
            break
    return sum((abs(median - value) * prob for value, prob in law.items()), Fraction(0))


def appendixB_min_abs_error(m: int) -> float:
    return float(appendixB_min_abs_error_exact(m))


def expected_abs_rademacher_sum(k: int) -> float:
    """E|S_k| from the exact law"""
    return float(sum((abs(value) * prob for value, prob in _rademacher_pmf(k)), Fraction(0)))


def deterministic_query_bound(N: int, k: int) -> float:
    """
    Lower bound on the mean absolute error of a k-query deterministic estimator of (<x,y>/N)^2

    [min_q E|q - S_m^2| - 2 E|S_k| E|S_m|] / N^2 with m = N - k unqueried coordinates.
    """
    if not 0 <= k <= N:
        raise DomainError(f"query count k={k} outside [0, {N}]")
    m = N - k
    gap = appendixB_min_abs_error(m) - 2 * expected_abs_rademacher_sum(k) * expected_abs_rademacher_sum(m)
    return gap / N**2
