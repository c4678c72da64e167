"""
Shared-codebook protocol for the vector-in-subspace promise problem
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from core_math.errors import DimensionError, DomainError, ValidationError
from core_math.rng import child_seed, split_rng
from core_math.states import haar_batch, haar_unitary
from core_math.types import Measurement, PureState
from protocol_framework.runs import ALICE, ProtocolRun

logger = logging.getLogger(__name__)

INSIDE = "inside"
OUTSIDE = "outside"
PROMISE_TOL = 1e-9
CODEBOOK_BLOCK = 4096
RAZ_K_CAP = 2**20
DEFAULT_TARGET = 2.0 / 3.0


@dataclass(frozen=True)
class VisInstance:
    """psi and projective M with <psi|M|psi> >= 2/3 (inside) or <= 1/3 (outside)"""

    psi: PureState
    m: Measurement
    label: str

    def __post_init__(self):
        if self.m.kind != "projective":
            raise ValidationError("vector-in-subspace needs a projective measurement")
        if self.psi.dimension != self.m.dimension:
            raise DimensionError("state and measurement dimensions differ")
        weight = self.weight
        if self.label == INSIDE and weight < 2 / 3 - PROMISE_TOL:
            raise ValidationError(f"inside instance has weight {weight:.4f} < 2/3")
        if self.label == OUTSIDE and weight > 1 / 3 + PROMISE_TOL:
            raise ValidationError(f"outside instance has weight {weight:.4f} > 1/3")
        if self.label not in (INSIDE, OUTSIDE):
            raise ValidationError(f"unknown label {self.label!r}")

    @property
    def weight(self) -> float:
        amps = self.psi.amplitudes
        return float(np.real(np.vdot(amps, self.m.projector @ amps)))

    @property
    def rank(self) -> int:
        return int(round(np.real(np.trace(self.m.projector))))

    @property
    def dimension(self) -> int:
        return self.psi.dimension


def promise_instance(N: int, label: str, kind: str, rng: np.random.Generator, rank: int | None = None) -> VisInstance:
    """
    Random promise instance with a Haar-rotated rank-r projector

    kind='extreme' puts psi Haar-random inside range(M) (or its complement);
    kind='boundary' mixes the two parts with weights exactly 2/3 and 1/3.
    """
    rank = rank if rank is not None else int(rng.integers(1, N))
    if not 1 <= rank <= N - 1:
        raise DomainError(f"rank {rank} outside [1, {N - 1}]")
    if kind not in ("extreme", "boundary"):
        raise ValidationError(f"unknown instance kind {kind!r}")
    basis = haar_unitary(N, rng)
    inside_part = basis[:, :rank] @ haar_batch(rank, 1, rng)[0]
    outside_part = basis[:, rank:] @ haar_batch(N - rank, 1, rng)[0]
    if kind == "extreme":
        vector = inside_part if label == INSIDE else outside_part
    else:
        w = 2 / 3 if label == INSIDE else 1 / 3
        vector = math.sqrt(w) * inside_part + math.sqrt(1 - w) * outside_part
    projector = basis[:, :rank] @ basis[:, :rank].conj().T
    return VisInstance(PureState.from_vector(vector), Measurement.projector_pair(projector), label)


def pad_to_half_rank(inst: VisInstance) -> VisInstance:
    """
    Embed into dimension N' with tr M' = N'/2: N' = N when r = N/2, else 2N

    psi gets zero amplitudes in the padding block; M gets N - r extra basis
    projectors there, so the overlap is unchanged.
    """
    N = inst.dimension
    r = inst.rank
    if r > N:
        raise DomainError("rank exceeds dimension")
    if 2 * r == N:
        return inst
    padded = 2 * N
    psi = np.concatenate([inst.psi.amplitudes, np.zeros(N, dtype=complex)])
    projector = np.zeros((padded, padded), dtype=complex)
    projector[:N, :N] = inst.m.projector
    extra = np.arange(N, N + (N - r))
    projector[extra, extra] = 1.0
    return VisInstance(PureState(psi), Measurement.projector_pair(projector), inst.label)


@dataclass(frozen=True)
class RazCodebook:
    """
    K Haar states in C^N' regenerated by both parties from the shared seed

    Block j (CODEBOOK_BLOCK states) comes from SeedSequence([seed, j]).
    `planted` states, if any, replace the first codewords.
    """

    seed: int
    K: int
    dimension: int
    planted: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.K < 1:
            raise ValidationError("codebook needs K >= 1")

    def block(self, j: int) -> np.ndarray:
        start = j * CODEBOOK_BLOCK
        rows = min(CODEBOOK_BLOCK, self.K - start)
        rng = np.random.default_rng(np.random.SeedSequence([self.seed, j]))
        states = haar_batch(self.dimension, rows, rng)
        for i, amps in enumerate(self.planted):
            if start <= i < start + rows:
                states[i - start] = amps
        return states

    def blocks(self):
        for j in range(math.ceil(self.K / CODEBOOK_BLOCK)):
            yield j * CODEBOOK_BLOCK, self.block(j)

    def state(self, index: int) -> np.ndarray:
        if not 0 <= index < self.K:
            raise ValidationError(f"codeword {index} outside [0, {self.K})")
        j, offset = divmod(index, CODEBOOK_BLOCK)
        return self.block(j)[offset]


def raz_protocol(inst: VisInstance, cb: RazCodebook, rng: np.random.Generator | None = None):
    """
    Alice names the codeword of largest |<phi_i|psi>| (ties to the smallest index);
    Bob outputs 1 iff <phi_i|M|phi_i> > 1/2

    Returns:
        tuple: (bit, ProtocolRun) with ceil(log2 K) bits sent
    """
    if cb.dimension != inst.dimension:
        raise DimensionError(f"codebook dimension {cb.dimension} != instance dimension {inst.dimension}")
    if 2 * inst.rank != inst.dimension:
        raise ValidationError("instance must be padded to half rank first")
    psi = inst.psi.amplitudes
    best_index, best_value = 0, -1.0
    for start, states in cb.blocks():
        overlaps = np.abs(states.conj() @ psi)
        local = int(np.argmax(overlaps))
        if overlaps[local] > best_value:
            best_index, best_value = start + local, float(overlaps[local])
    run = ProtocolRun(protocol="raz")
    run.send_index(ALICE, best_index, cb.K)
    phi = cb.state(best_index)
    weight = float(np.real(np.vdot(phi, inst.m.projector @ phi)))
    bit = int(weight > 0.5)
    run.output = bit
    run.details.update({"index": best_index, "overlap": best_value, "codeword_weight": weight})
    return bit, run


@dataclass(frozen=True)
class RazSuccess:
    N: int
    K: int
    trials: int
    successes: int
    ci_low: float
    ci_high: float

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    def to_record(self) -> dict:
        return {"N": self.N, "K": self.K, "trials": self.trials, "success_rate": self.rate,
                "ci_low": self.ci_low, "ci_high": self.ci_high}


def raz_success_rate(N: int, K: int, trials: int, rng: np.random.Generator, kind: str = "extreme",
                     plant: bool = False) -> RazSuccess:
    """
    Success rate over `trials` instances per label, each with a fresh codebook

    Args:
        N: dimension before padding
        K: codebook size
        trials: instances per label
        rng: generator driving instances and codebook seeds
        kind: 'extreme' or 'boundary' promise instances
        plant: put psi itself into the codebook (test hook)

    Returns:
        RazSuccess: counts and the 95% Wilson interval
    """
    successes = 0
    for label in (INSIDE, OUTSIDE):
        expected = 1 if label == INSIDE else 0
        for _ in range(trials):
            inst = pad_to_half_rank(promise_instance(N, label, kind, rng))
            planted = (inst.psi.amplitudes,) if plant else ()
            cb = RazCodebook(child_seed(rng), K, inst.dimension, planted)
            bit, _ = raz_protocol(inst, cb)
            successes += int(bit == expected)
    total = 2 * trials
    ci = binomtest(successes, total).proportion_ci(confidence_level=0.95, method="wilson")
    return RazSuccess(N, K, total, successes, float(ci.low), float(ci.high))


def calibrate_raz(Ns, rng: np.random.Generator, target: float = DEFAULT_TARGET, trials: int = 250,
                  k_cap: int = RAZ_K_CAP, kind: str = "extreme", plant: bool = False) -> list[dict]:
    """
    Doubling search for the smallest power-of-two K whose success rate reaches `target`

    Hitting `k_cap` without success is reported as unresolved. Row k draws from
    child stream k of a single spawned seed.
    """
    table = []
    streams = split_rng(child_seed(rng), len(Ns))
    for N, stream in zip(Ns, streams):
        K = 1
        row = {"N": N, "K": None, "log2_K": None, "success_rate": None, "resolved": False}
        while K <= k_cap:
            result = raz_success_rate(N, K, trials, stream, kind, plant)
            logger.debug("calibrate N=%d K=%d rate=%.3f", N, K, result.rate)
            if result.rate >= target:
                row.update({"K": K, "log2_K": math.log2(K), "success_rate": result.rate, "resolved": True})
                break
            K *= 2
        if not row["resolved"]:
            logger.warning("no K up to %d reached %.3f at N=%d", k_cap, target, N)
        table.append(row)
    return table
