"""
Rectangles A x B, leaf-rectangle decomposition of protocol trees, and xi_p measures of rectangles
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from core_math.errors import CapacityError, DomainError, ValidationError
from core_math.walsh import fwht, popcount
from protocol_framework.runs import ALICE
from protocol_framework.tree import ProtocolTree

logger = logging.getLogger(__name__)

MAX_PAIR_DOMAIN = 2**24
MAX_EXPLICIT_N = 12
MC_CHUNK = 2**17


def cube_points(N: int) -> np.ndarray:
    """All of {-1,+1}^N as a (2^N, N) int8 array; row idx has x_i = (-1)^{bit i of idx}"""
    if N > 20:
        raise CapacityError(f"cannot enumerate the {N}-cube")
    idx = np.arange(2**N, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(N, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.int8)


def sign_index(xs: np.ndarray) -> np.ndarray:
    """Inverse of `cube_points`: integer index of each sign row"""
    bits = (np.asarray(xs) < 0).astype(np.int64)
    return bits @ (np.int64(1) << np.arange(bits.shape[-1], dtype=np.int64))


@dataclass(frozen=True)
class Rectangle:
    """
    Product set A x B

    Explicit form: boolean masks over Alice's and Bob's input indices (for cube
    rectangles, indices follow `cube_points`). Predicate form: vectorized
    membership tests on (k, N) sign arrays, used for Monte Carlo above
    MAX_EXPLICIT_N.
    """

    alice_mask: np.ndarray | None = None
    bob_mask: np.ndarray | None = None
    alice_predicate: Callable | None = None
    bob_predicate: Callable | None = None
    N: int | None = None
    label: str = ""

    def __post_init__(self):
        explicit = self.alice_mask is not None and self.bob_mask is not None
        predicate = self.alice_predicate is not None and self.bob_predicate is not None
        if not (explicit or predicate):
            raise ValidationError("rectangle needs both masks or both predicates")
        if explicit:
            for name in ("alice_mask", "bob_mask"):
                mask = np.asarray(getattr(self, name), dtype=bool)
                mask.setflags(write=False)
                object.__setattr__(self, name, mask)

    @classmethod
    def from_masks(cls, alice, bob, N: int | None = None, label: str = "") -> "Rectangle":
        return cls(alice_mask=np.asarray(alice, dtype=bool), bob_mask=np.asarray(bob, dtype=bool), N=N, label=label)

    @classmethod
    def from_predicates(cls, alice, bob, N: int, label: str = "") -> "Rectangle":
        return cls(alice_predicate=alice, bob_predicate=bob, N=N, label=label)

    @classmethod
    def full(cls, N: int) -> "Rectangle":
        size = 2**N
        return cls.from_masks(np.ones(size, bool), np.ones(size, bool), N=N, label="full")

    @property
    def is_explicit(self) -> bool:
        return self.alice_mask is not None

    @property
    def size(self) -> int:
        return int(self.alice_mask.sum()) * int(self.bob_mask.sum())

    def contains(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Membership of each sign-row pair (xs[k], ys[k])"""
        if self.is_explicit:
            return self.alice_mask[sign_index(xs)] & self.bob_mask[sign_index(ys)]
        return np.asarray(self.alice_predicate(xs), bool) & np.asarray(self.bob_predicate(ys), bool)

    def contains_index(self, x: int, y: int) -> bool:
        return bool(self.alice_mask[x] and self.bob_mask[y])


@dataclass(frozen=True)
class LeafRectangle:
    rectangle: Rectangle
    accept: bool
    leaf: int


def decompose_to_rectangles(tree: ProtocolTree) -> list[LeafRectangle]:
    """
    Rectangles of all leaves of a deterministic tree

    Alice's messages split A, Bob's split B; the leaf rectangles partition X x Y
    and every input pair lands in the rectangle of the leaf it reaches.

    Raises:
        CapacityError: if |X| * |Y| exceeds MAX_PAIR_DOMAIN
    """
    if tree.n_alice * tree.n_bob > MAX_PAIR_DOMAIN:
        raise CapacityError(f"domain {tree.n_alice}x{tree.n_bob} too large to enumerate")
    out: list[LeafRectangle] = []
    stack = [(0, np.ones(tree.n_alice, bool), np.ones(tree.n_bob, bool))]
    while stack:
        index, a_mask, b_mask = stack.pop()
        node = tree.nodes[index]
        if node.is_leaf:
            out.append(LeafRectangle(Rectangle.from_masks(a_mask, b_mask), bool(node.accept), index))
            continue
        table = np.asarray(node.table, dtype=bool)
        for bit in (0, 1):
            chosen = table if bit else ~table
            if node.speaker == ALICE:
                stack.append((node.children[bit], a_mask & chosen, b_mask))
            else:
                stack.append((node.children[bit], a_mask, b_mask & chosen))
    out.sort(key=lambda item: item.leaf)
    return out


@dataclass(frozen=True)
class Measure:
    value: float
    stderr: float
    mode: str
    samples: int = 0


def _check_correlation(p: float) -> None:
    if not -1.0 <= p <= 1.0:
        raise DomainError(f"correlation p={p} outside [-1, 1]")


def pair_weight(N: int, p: float, overlap):
    """xi_p probability of one specific pair (x, y) with <x,y> = overlap"""
    overlap = np.asarray(overlap, dtype=float)
    agree = (N + overlap) / 2
    return 2.0 ** -N * ((1 + p) / 2) ** agree * ((1 - p) / 2) ** (N - agree)


def rect_fourier_spectra(rect: Rectangle) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Normalized Fourier coefficients of 1_A and 1_B plus |S| for each character"""
    size = rect.alice_mask.size
    a_hat = fwht(rect.alice_mask.astype(float)) / size
    b_hat = fwht(rect.bob_mask.astype(float)) / size
    return a_hat, b_hat, popcount(np.arange(size))


def rect_measure_exact(rect: Rectangle, p: float, spectra=None) -> float:
    """
    xi_p(A x B) = sum_S p^{|S|} A^(S) B^(S)

    Equal to the pair sum over A x B of 2^-N ((1+p)/2)^{(N+<x,y>)/2} ((1-p)/2)^{(N-<x,y>)/2}.
    """
    _check_correlation(p)
    a_hat, b_hat, weights = spectra if spectra is not None else rect_fourier_spectra(rect)
    return float(np.sum(np.power(float(p), weights) * a_hat * b_hat))


def rect_measure_direct(rect: Rectangle, p: float) -> float:
    """Pair-by-pair sum over A x B; oracle for `rect_measure_exact`"""
    _check_correlation(p)
    N = int(np.log2(rect.alice_mask.size))
    if rect.size > MAX_PAIR_DOMAIN:
        raise CapacityError("rectangle too large for direct enumeration")
    points = cube_points(N).astype(np.int64)
    overlaps = points[rect.alice_mask] @ points[rect.bob_mask].T
    counts = np.bincount((overlaps.ravel() + N), minlength=2 * N + 1)
    deltas = np.arange(-N, N + 1)
    return float(np.sum(counts * pair_weight(N, p, deltas)))


def rect_measure(rect: Rectangle, p: float, mode: str = "exact", samples: int = 100_000,
                 rng: np.random.Generator | None = None) -> Measure:
    """
    Measure of a rectangle under xi_p

    Args:
        rect: explicit (mode='exact' or 'mc') or predicate rectangle (mode='mc')
        p: correlation in [-1, 1]
        mode: 'exact' (Fourier evaluation, N <= 20) or 'mc'
        samples: Monte Carlo sample count
        rng: generator, required for 'mc'

    Returns:
        Measure: value with binomial standard error (0 in exact mode)
    """
    _check_correlation(p)
    if mode == "exact":
        if not rect.is_explicit:
            raise ValidationError("exact mode needs an explicit rectangle")
        return Measure(rect_measure_exact(rect, p), 0.0, "exact")
    if mode != "mc":
        raise ValidationError(f"unknown mode {mode!r}")
    if rng is None:
        raise ValidationError("monte-carlo mode needs a generator")
    from lemma_lab.xi import xi_sample_batch

    N = rect.N if rect.N is not None else int(np.log2(rect.alice_mask.size))
    hits = 0
    remaining = samples
    while remaining > 0:
        chunk = min(remaining, MC_CHUNK)
        xs, ys = xi_sample_batch(N, p, chunk, rng)
        hits += int(np.count_nonzero(rect.contains(xs, ys)))
        remaining -= chunk
    freq = hits / samples
    stderr = float(np.sqrt(max(freq * (1 - freq), 0.0) / samples))
    logger.debug("mc measure %s p=%.4f: %.6f +- %.2e", rect.label, p, freq, stderr)
    return Measure(freq, stderr, "mc", samples)
