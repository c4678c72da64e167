"""
Named numerical checks, each producing one verdict record
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from core_math.analytic import check_binomial_bounds
from core_math.errors import ValidationError
from core_math.rng import make_rng
from lemma_lab import calculus, gaussian, projections, skew, xi
from protocol_framework.accounting import acceptance_accounting, direct_acceptance
from protocol_framework.tree import random_protocol

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-12
STABILITY_LIMIT = 0.2
SCALING_BAND = 2.0


@dataclass
class Verdict:
    check: str
    params: dict
    lhs: float
    rhs: float
    margin: float
    holds: bool
    samples: int = 0
    seed: int | None = None
    details: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        record = asdict(self)
        record["holds"] = bool(self.holds)
        return record


def _param(params: dict, key: str, default, cast=float):
    value = params.get(key, default)
    try:
        if isinstance(default, list) and isinstance(value, str):
            return [cast(v) for v in value.split(",") if v.strip()]
        if isinstance(value, (list, tuple)):
            return [cast(v) for v in value]
        if isinstance(default, list):
            return [cast(value)]
        return cast(value)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"parameter {key}={value!r}: {e}") from None


def check_fact1(params: dict, rng) -> Verdict:
    """Closed-form E[(<x,y>/N)^2] against the pmf-weighted sum"""
    N = _param(params, "N", 4, int)
    p = _param(params, "p", 0.5)
    lhs = xi.expected_squared_overlap_enumerated(N, p)
    rhs = xi.expected_squared_overlap(N, p)
    return Verdict("fact1", {"N": N, "p": p}, lhs, rhs, rhs - lhs, abs(lhs - rhs) <= EXACT_TOL)


def check_overlap_normalization(params: dict, rng) -> Verdict:
    N = _param(params, "N", 64, int)
    p = _param(params, "p", 0.3)
    total = float(xi.overlap_pmf_vector(N, p).sum())
    return Verdict("xi-overlap", {"N": N, "p": p}, total, 1.0, 1.0 - total, abs(total - 1.0) <= 1e-10)


def check_padded_overlap(params: dict, rng) -> Verdict:
    """xi'_p overlap law against the xi_p overlap law, entrywise"""
    N = _param(params, "N", 16, int)
    p = _param(params, "p", 0.5)
    gap = float(np.max(np.abs(xi.xi_prime_overlap_pmf(N, p) - xi.embed_overlap_pmf(N, p))))
    return Verdict("fact2-overlap", {"N": N, "p": p}, gap, 0.0, -gap, gap <= EXACT_TOL)


def check_techbound(params: dict, rng) -> Verdict:
    """Stability of the maximal ratio across N"""
    Ns = _param(params, "Ns", [100, 400, 1600], int)
    p = _param(params, "p", 0.01)
    sweeps = [xi.techbound_sweep(N, p) for N in Ns]
    ratios = [s.max_ratio for s in sweeps]
    spread = xi.constant_stability(ratios)
    return Verdict("techbound", {"Ns": Ns, "p": p}, spread, STABILITY_LIMIT, STABILITY_LIMIT - spread,
                   spread <= STABILITY_LIMIT,
                   details={"max_ratios": ratios, "C_emp": max(ratios),
                            "in_hypothesis": all(s.in_hypothesis for s in sweeps)})


def check_shift_semigroup(params: dict, rng) -> Verdict:
    p = _param(params, "p", -0.2)
    q1 = _param(params, "q1", 0.3)
    q2 = _param(params, "q2", 0.4)
    lhs = xi.shift_correlation(xi.shift_correlation(p, q1), q2)
    rhs = xi.shift_correlation(p, q1 + q2 - q1 * q2)
    return Verdict("shift-semigroup", {"p": p, "q1": q1, "q2": q2}, lhs, rhs, rhs - lhs,
                   abs(lhs - rhs) <= EXACT_TOL)


def check_shift_sampling(params: dict, rng) -> Verdict:
    """Per-coordinate agreement after shifting xi_p samples by q"""
    N = _param(params, "N", 8, int)
    p = _param(params, "p", -0.2)
    q = _param(params, "q", 0.3)
    samples = _param(params, "samples", 200_000, int)
    x, y = xi.xi_sample_batch(N, p, samples, rng)
    xs, ys = xi.shift_pairs(x, y, q, rng)
    agreement = float(np.mean(xs == ys))
    expected = (1 + xi.shift_correlation(p, q)) / 2
    sigma = math.sqrt(expected * (1 - expected) / (samples * N))
    return Verdict("shift-mc", {"N": N, "p": p, "q": q}, agreement, expected, 3 * sigma - abs(agreement - expected),
                   abs(agreement - expected) <= 3 * sigma, samples)


def check_skew(params: dict, rng) -> Verdict:
    """Exact sweep over random and adversarial large rectangles"""
    N = _param(params, "N", 12, int)
    b = _param(params, "b", 10.0)
    delta = _param(params, "delta", skew.DEFAULT_DELTA)
    s_values = _param(params, "s", [-3.0, -1.0, 0.0, 1.0, 3.0])
    count = _param(params, "rectangles", skew.DEFAULT_RANDOM_RECTANGLES, int)
    summary = skew.skew_sweep(N, b, s_values, skew.adversarial_family(N, rng, count), delta)
    margin = summary["min_margin"] if summary["min_margin"] is not None else 0.0
    return Verdict("skew", {"N": N, "b": b, "delta": delta, "s": s_values, "rectangles": count},
                   summary["violations"], 0,
                   margin, summary["violations"] == 0, details=summary)


def check_sign_map(params: dict, rng) -> Verdict:
    eta = _param(params, "eta", 0.3)
    N = _param(params, "N", 6, int)
    samples = _param(params, "samples", 200_000, int)
    result = gaussian.sign_map_check(eta, N, samples, rng)
    return Verdict("sign-map", {"eta": eta, "N": N}, result.empirical_agreement, result.expected_agreement,
                   3 * result.stderr - abs(result.empirical_agreement - result.expected_agreement),
                   result.holds, samples, details={"p": result.p})


def check_f_function(params: dict, rng) -> Verdict:
    step = _param(params, "step", 1e-4)
    summary = calculus.f_function_grid(step)
    failures = summary["bound_failures"] + summary["derivative_failures"]
    return Verdict("f-function", {"step": step}, failures, 0, -failures, failures == 0, details=summary)


def check_binomial(params: dict, rng) -> Verdict:
    N_max = _param(params, "N", 200, int)
    failures = sum(
        0 if check_binomial_bounds(N, k).holds else 1
        for N in range(2, N_max + 1)
        for k in range(1, N)
    )
    return Verdict("binomial-bounds", {"N": N_max}, failures, 0, -failures, failures == 0)


def check_min_abs_error(params: dict, rng) -> Verdict:
    """value/m confined to a band of ratio at most 2 over the m grid"""
    ms = _param(params, "m", [8, 16, 32, 64], int)
    scaled = [calculus.appendixB_min_abs_error(m) / m for m in ms]
    ratio = max(scaled) / min(scaled)
    return Verdict("appendixB", {"m": ms}, ratio, SCALING_BAND, SCALING_BAND - ratio, ratio <= SCALING_BAND,
                   details={"value_over_m": scaled})


def check_randomproj(params: dict, rng) -> Verdict:
    N = _param(params, "N", 16, int)
    r = _param(params, "r", 4, int)
    delta = _param(params, "delta", 1.0)
    trials = _param(params, "trials", 100_000, int)
    result = projections.randomproj_tail_check(N, r, delta, trials, rng)
    return Verdict("randomproj", {"N": N, "r": r, "delta": delta}, result.empirical_tail, result.bound,
                   result.bound + 3 * result.stderr - result.empirical_tail, result.holds, trials)


def check_overlap_law(params: dict, rng) -> Verdict:
    N = _param(params, "N", 16, int)
    samples = _param(params, "samples", 100_000, int)
    result = projections.overlap_law_check(N, samples, rng)
    return Verdict("overlap-law", {"N": N}, result.ks_statistic, projections.KS_LIMIT,
                   projections.KS_LIMIT - result.ks_statistic, result.holds, samples,
                   details={"pvalue": result.ks_pvalue, "tails": list(result.tails)})


def check_accounting(params: dict, rng) -> Verdict:
    """Rectangle accounting against direct replay on random protocols and input distributions"""
    protocols = _param(params, "protocols", 20, int)
    depth = _param(params, "depth", 3, int)
    size = _param(params, "size", 16, int)
    worst = 0.0
    eta_ok = True
    for _ in range(protocols):
        protocol = random_protocol(size, size, depth, 3, rng)
        mu = rng.random((size, size))
        mu /= mu.sum()
        result = acceptance_accounting(protocol, mu)
        worst = max(worst, abs(result.total - direct_acceptance(protocol, mu)))
        eta_ok = eta_ok and result.eta_bound_holds
    return Verdict("accounting", {"protocols": protocols, "depth": depth, "size": size}, worst, EXACT_TOL,
                   EXACT_TOL - worst, worst <= EXACT_TOL and eta_ok)


def check_contradiction(params: dict, rng) -> Verdict:
    b = _param(params, "b", 10.0)
    s = _param(params, "s", 2.0)
    result = xi.contradiction_margin(b, s)
    return Verdict("contradiction", {"b": b, "s": s}, result.lower, result.upper, result.gap, result.holds)


def check_query_bound(params: dict, rng) -> Verdict:
    N = _param(params, "N", 64, int)
    k = _param(params, "k", 2, int)
    value = calculus.deterministic_query_bound(N, k)
    return Verdict("query-bound", {"N": N, "k": k}, value, 0.0, value, value > 0)


CHECKS = {
    "fact1": check_fact1,
    "xi-overlap": check_overlap_normalization,
    "fact2-overlap": check_padded_overlap,
    "techbound": check_techbound,
    "shift-semigroup": check_shift_semigroup,
    "shift-mc": check_shift_sampling,
    "skew": check_skew,
    "sign-map": check_sign_map,
    "f-function": check_f_function,
    "binomial-bounds": check_binomial,
    "appendixB": check_min_abs_error,
    "randomproj": check_randomproj,
    "overlap-law": check_overlap_law,
    "accounting": check_accounting,
    "contradiction": check_contradiction,
    "query-bound": check_query_bound,
}


def run_check(name: str, params: dict, seed: int | None) -> Verdict:
    """
    Run one named check with a generator seeded from `seed`

    Raises:
        ValidationError: for an unknown check name
    """
    if name not in CHECKS:
        raise ValidationError(f"unknown check {name!r}; choose from {', '.join(sorted(CHECKS))}")
    verdict = CHECKS[name](params, make_rng(seed))
    verdict.seed = seed
    logger.info("check %s: holds=%s margin=%.3g", name, verdict.holds, verdict.margin)
    return verdict
