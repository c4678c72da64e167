"""
Distances between outcome distributions
"""

from __future__ import annotations

from core_math.types import OutcomeDistribution


def l1_distance(a: OutcomeDistribution, b: OutcomeDistribution) -> float:
    """
    sum_i |a_i - b_i| over the union of supports (missing keys read as 0)

    Returns:
        float: value in [0, 2]
    """
    keys = set(a.probabilities) | set(b.probabilities)
    return float(sum(abs(a.get(k) - b.get(k)) for k in keys))


def total_variation(a: OutcomeDistribution, b: OutcomeDistribution) -> float:
    return 0.5 * l1_distance(a, b)
