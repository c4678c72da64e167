"""
Skewed anticoncentration of large rectangles and the rectangle families it is swept over
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from core_math.errors import DomainError, ValidationError
from core_math.walsh import popcount
from protocol_framework.rectangles import (
    MAX_EXPLICIT_N,
    Rectangle,
    cube_points,
    decompose_to_rectangles,
    rect_fourier_spectra,
    rect_measure,
    rect_measure_exact,
)
from protocol_framework.tree import random_tree

logger = logging.getLogger(__name__)

DEFAULT_DELTA = 0.1
MC_TOLERANCE_SIGMAS = 4.0
DEFAULT_RANDOM_RECTANGLES = 1000


@dataclass(frozen=True)
class SkewCheckConfig:
    N: int
    b: float
    s: float = 0.0
    delta: float = DEFAULT_DELTA
    mode: str = "exact"
    samples: int = 200_000

    def __post_init__(self):
        if self.b <= 0:
            raise DomainError("shift parameter b must be positive")
        if self.delta <= 0:
            raise DomainError("largeness exponent delta must be positive")
        if self.b > self.N:
            raise DomainError(f"b={self.b} gives p > 1 at N={self.N}")
        if self.mode not in ("exact", "mc"):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if self.mode == "exact" and self.N > MAX_EXPLICIT_N:
            raise ValidationError(f"exact mode is limited to N <= {MAX_EXPLICIT_N}")

    @property
    def p(self) -> float:
        return math.sqrt(self.b / self.N)

    @property
    def largeness(self) -> float:
        return 2.0 ** (-self.delta * self.N)


@dataclass(frozen=True)
class SkewCheckResult:
    lhs: float
    rhs: float
    margin: float
    holds: bool
    skipped: bool
    uniform_measure: float
    tolerance: float = 0.0
    label: str = ""

    def to_record(self) -> dict:
        return {
            "rectangle": self.label,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "holds": self.holds,
            "skipped": self.skipped,
            "xi0": self.uniform_measure,
            "tolerance": self.tolerance,
        }


def skewed_anticoncentration_check(cfg: SkewCheckConfig, R: Rectangle,
                                   rng: np.random.Generator | None = None,
                                   spectra=None) -> SkewCheckResult:
    """
    Compare (1/2)(e^s xi_{-p}(R) + e^{-s} xi_p(R)) against (2/3) xi_0(R), p = sqrt(b/N)

    Rectangles with xi_0(R) < 2^{-delta N} are reported as skipped. In Monte Carlo
    mode the comparison allows 4 combined standard errors.

    Args:
        cfg: N, b, s, delta and the evaluation mode
        R: explicit rectangle (exact) or any rectangle (mc)
        rng: generator, required for mc
        spectra: precomputed `rect_fourier_spectra(R)` to reuse across s values

    Returns:
        SkewCheckResult
    """
    p = cfg.p
    if cfg.mode == "exact":
        spectra = spectra if spectra is not None else rect_fourier_spectra(R)
        xi0 = rect_measure_exact(R, 0.0, spectra)
        if xi0 < cfg.largeness:
            return SkewCheckResult(0.0, 0.0, 0.0, True, True, xi0, label=R.label)
        minus = rect_measure_exact(R, -p, spectra)
        plus = rect_measure_exact(R, p, spectra)
        tolerance = 0.0
    else:
        m0 = rect_measure(R, 0.0, "mc", cfg.samples, rng)
        xi0 = m0.value
        if xi0 < cfg.largeness:
            return SkewCheckResult(0.0, 0.0, 0.0, True, True, xi0, label=R.label)
        m_minus = rect_measure(R, -p, "mc", cfg.samples, rng)
        m_plus = rect_measure(R, p, "mc", cfg.samples, rng)
        minus, plus = m_minus.value, m_plus.value
        lhs_err = 0.5 * math.hypot(math.exp(cfg.s) * m_minus.stderr, math.exp(-cfg.s) * m_plus.stderr)
        tolerance = MC_TOLERANCE_SIGMAS * math.hypot(lhs_err, 2.0 / 3.0 * m0.stderr)
    lhs = 0.5 * (math.exp(cfg.s) * minus + math.exp(-cfg.s) * plus)
    rhs = 2.0 / 3.0 * xi0
    margin = lhs - rhs
    holds = lhs >= rhs - tolerance
    if not holds:
        logger.warning("skew violation on %s: lhs=%.6g rhs=%.6g (s=%g)", R.label, lhs, rhs, cfg.s)
    return SkewCheckResult(lhs, rhs, margin, holds, False, xi0, tolerance, R.label)


def skew_sweep(N: int, b: float, s_values, rectangles, delta: float = DEFAULT_DELTA) -> dict:
    """Exact sweep over rectangles and skews; spectra are computed once per rectangle"""
    checked = skipped = violations = 0
    worst = math.inf
    for rect in rectangles:
        spectra = rect_fourier_spectra(rect)
        for s in s_values:
            result = skewed_anticoncentration_check(SkewCheckConfig(N, b, s, delta), rect, spectra=spectra)
            if result.skipped:
                skipped += 1
                continue
            checked += 1
            violations += 0 if result.holds else 1
            worst = min(worst, result.margin)
    return {"checked": checked, "skipped": skipped, "violations": violations,
            "min_margin": worst if checked else None}


# rectangle families; explicit masks follow the cube_points indexing

def random_density(N: int, density: float, rng: np.random.Generator, label: str = "random") -> Rectangle:
    """A and B independent random subsets, each point kept with probability `density`"""
    size = 2**N
    return Rectangle.from_masks(rng.random(size) < density, rng.random(size) < density, N=N, label=label)


def hamming_ball(N: int, center_a: int, center_b: int, radius: int) -> Rectangle:
    """Product of two Hamming balls of the same radius around index-encoded centers"""
    idx = np.arange(2**N)
    a = popcount(idx ^ center_a) <= radius
    b = popcount(idx ^ center_b) <= radius
    return Rectangle.from_masks(a, b, N=N, label=f"ball(r={radius})")


def threshold(N: int, t_alice: int, t_bob: int, flip_bob: bool = False) -> Rectangle:
    """
    Majority-type sets {x : sum x >= t}; `flip_bob` uses {y : sum y <= -t} instead

    Above MAX_EXPLICIT_N the rectangle is built in predicate form.
    """
    sign = -1 if flip_bob else 1

    def alice(xs):
        return np.asarray(xs).sum(axis=-1) >= t_alice

    def bob(ys):
        return sign * np.asarray(ys).sum(axis=-1) >= t_bob

    label = f"threshold({t_alice},{t_bob}{',flipped' if flip_bob else ''})"
    if N > MAX_EXPLICIT_N:
        return Rectangle.from_predicates(alice, bob, N=N, label=label)
    points = cube_points(N)
    return Rectangle.from_masks(alice(points), bob(points), N=N, label=label)


def protocol_leaf(N: int, depth: int, rng: np.random.Generator) -> list[Rectangle]:
    """Accepting leaf rectangles of a random depth-`depth` tree over the N-cube"""
    tree = random_tree(2**N, 2**N, depth, rng)
    return [
        Rectangle.from_masks(leaf.rectangle.alice_mask, leaf.rectangle.bob_mask, N=N, label=f"leaf{leaf.leaf}")
        for leaf in decompose_to_rectangles(tree)
        if leaf.accept
    ]


def adversarial_family(N: int, rng: np.random.Generator,
                       random_count: int = DEFAULT_RANDOM_RECTANGLES) -> list[Rectangle]:
    """Random dense sets plus Hamming balls, threshold sets and protocol leaves"""
    rects = [Rectangle.full(N)]
    rects += [random_density(N, rng.uniform(0.66, 0.95), rng, label=f"random{i}") for i in range(random_count)]
    for radius in range(N // 2, N + 1):
        rects.append(hamming_ball(N, 0, 0, radius))
        rects.append(hamming_ball(N, 0, 2**N - 1, radius))
        rects.append(hamming_ball(N, 0, int(rng.integers(2**N)), radius))
    for t in range(-N, 1, 2):
        rects.append(threshold(N, t, t))
        rects.append(threshold(N, t, t, flip_bob=True))
    for _ in range(5):
        rects += protocol_leaf(N, 2, rng)
    return rects
