"""
Query algorithms over h = fg run as two-party protocols, and the sqrt(N) agreement sampler
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from core_math.errors import DimensionError, DomainError, ValidationError
from core_math.types import SignVector
from protocol_framework.runs import ALICE, BOB, ProtocolRun


def _sign_bit(value: int) -> int:
    return 0 if value > 0 else 1


def query_to_comm(algorithm: Callable) -> Callable:
    """
    Wrap a query algorithm over h = fg into a two-party protocol

    `algorithm(query, rng)` may call query(z) any number of times and gets h(z).
    Each query costs 2 bits: Alice sends f(z), Bob sends g(z).

    Returns:
        callable: protocol(f, g, rng) -> (output, ProtocolRun)
    """
    def protocol(f: SignVector, g: SignVector, rng: np.random.Generator):
        if len(f) != len(g):
            raise DimensionError("f and g must have equal lengths")
        run = ProtocolRun(protocol=getattr(algorithm, "__name__", "query"))

        def query(z: int) -> int:
            a = int(f.entries[z])
            b = int(g.entries[z])
            run.send_bit(ALICE, _sign_bit(a))
            run.send_bit(BOB, _sign_bit(b))
            return a * b

        run.output = algorithm(query, rng)
        run.details["queries"] = run.bits_sent // 2
        return run.output, run

    return protocol


def run_query_protocol(algorithm: Callable, h: SignVector, rng: np.random.Generator):
    """Run the query algorithm directly on h; returns (output, query count)"""
    count = 0

    def query(z: int) -> int:
        nonlocal count
        count += 1
        return int(h.entries[z])

    return algorithm(query, rng), count


def agreement_sampler(length: int, k: int) -> Callable:
    """Query k uniform positions (with replacement); accept iff all answers agree"""
    if k < 1:
        raise ValidationError("the sampler needs at least one query")

    def sqrt_sampler_algorithm(query, rng):
        positions = rng.integers(0, length, size=k)
        answers = {query(int(z)) for z in positions}
        return len(answers) == 1

    return sqrt_sampler_algorithm


def sqrt_sampler(x: SignVector, y: SignVector, k: int, rng: np.random.Generator):
    """
    Accept iff x and y agree on all k sampled positions or disagree on all of them

    Returns:
        tuple: (accept, ProtocolRun) with 2k bits sent
    """
    if len(x) != len(y):
        raise DimensionError("x and y must have equal lengths")
    accept, run = query_to_comm(agreement_sampler(len(x), k))(x, y, rng)
    return bool(accept), run


def sqrt_sampler_exact_prob(agree_fraction: float, k: int) -> float:
    """a^k + (1 - a)^k"""
    if not 0.0 <= agree_fraction <= 1.0:
        raise DomainError(f"agreement fraction {agree_fraction} outside [0, 1]")
    return agree_fraction**k + (1.0 - agree_fraction) ** k


def agreement_fraction(x: SignVector, y: SignVector) -> float:
    return float(np.mean(x.entries == y.entries))


@dataclass(frozen=True)
class CoshApproximation:
    N: int
    delta: float
    exact: float
    approximation: float

    @property
    def relative_error(self) -> float:
        return abs(self.approximation - self.exact) / self.exact


def cosh_approximation(N: int, delta: float) -> CoshApproximation:
    """
    2^{1 - sqrt N} cosh(2 delta) against the exact acceptance at agreement 1/2 + delta/sqrt N
    with sqrt N queries
    """
    k = math.sqrt(N)
    if abs(delta) > k / 2:
        raise DomainError(f"|delta|={abs(delta)} exceeds sqrt(N)/2")
    exact = sqrt_sampler_exact_prob(0.5 + delta / k, k)
    approximation = 2.0 ** (1 - k) * math.cosh(2 * delta)
    return CoshApproximation(N, delta, exact, approximation)
