"""
Rectangle accounting of acceptance probabilities for shared-randomness protocols
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from core_math.errors import CapacityError, ValidationError
from protocol_framework.rectangles import MAX_PAIR_DOMAIN, decompose_to_rectangles
from protocol_framework.tree import RandomizedProtocol

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class AccountingResult:
    total: float
    eta: float
    large_rect_sum: float
    depth_bound: int
    small_threshold: float
    rectangles: int

    @property
    def identity_holds(self) -> bool:
        return abs(self.total - (self.eta + self.large_rect_sum)) <= NORMALIZATION_TOL

    @property
    def eta_bound_holds(self) -> bool:
        return 0.0 <= self.eta < 2.0 ** -self.depth_bound


def acceptance_accounting(protocol: RandomizedProtocol, mu) -> AccountingResult:
    """
    Pr[P accepts] = sum_D pi(D) sum_{accepting R in R_D} mu(R), split at mu(R) = 2^{-2c}

    Args:
        protocol: mixture of deterministic trees of depth <= c
        mu: (|X|, |Y|) array, a distribution over input pairs

    Returns:
        AccountingResult: total, eta (contribution of rectangles with mu(R) < 2^{-2c})
        and the large-rectangle sum
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (protocol.n_alice, protocol.n_bob):
        raise ValidationError(f"mu has shape {mu.shape}, expected {(protocol.n_alice, protocol.n_bob)}")
    if mu.size > MAX_PAIR_DOMAIN:
        raise CapacityError("input domain too large to enumerate")
    if mu.min() < 0 or abs(mu.sum() - 1.0) > NORMALIZATION_TOL * mu.size:
        raise ValidationError(f"mu is not a distribution (sum {mu.sum()})")

    c = protocol.depth_bound
    threshold = 2.0 ** (-2 * c)
    eta = 0.0
    large = 0.0
    count = 0
    for tree, weight in protocol.support:
        for leaf in decompose_to_rectangles(tree):
            if not leaf.accept:
                continue
            rect = leaf.rectangle
            mass = float(rect.alice_mask.astype(float) @ mu @ rect.bob_mask.astype(float))
            count += 1
            if mass < threshold:
                eta += weight * mass
            else:
                large += weight * mass
    result = AccountingResult(
        total=eta + large,
        eta=eta,
        large_rect_sum=large,
        depth_bound=c,
        small_threshold=threshold,
        rectangles=count,
    )
    if not result.eta_bound_holds:
        logger.warning("eta=%.3e is not below 2^-c=%.3e", eta, 2.0 ** -c)
    return result


def direct_acceptance(protocol: RandomizedProtocol, mu) -> float:
    """sum_{x,y} mu(x,y) Pr[accept (x,y)] by replaying every tree on every pair"""
    return float(np.sum(np.asarray(mu, dtype=float) * protocol.acceptance_matrix()))


def uniform_mu(n_alice: int, n_bob: int) -> np.ndarray:
    return np.full((n_alice, n_bob), 1.0 / (n_alice * n_bob))
