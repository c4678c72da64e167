"""
Classical state transmission through an amplitude-grid epsilon-net
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from core_math.distributions import l1_distance
from core_math.errors import DimensionError, EncodingError, ValidationError
from core_math.states import haar_batch
from core_math.types import PureState
from protocol_framework.runs import ALICE, ProtocolRun
from quantum_protocols.dqs import dqs_distribution
from quantum_protocols.instances import DqsInstance

logger = logging.getLogger(__name__)

AMPLITUDE_TOL = 1e-12
CALIBRATION_SAMPLES = 2000
MAX_CALIBRATION_STEPS = 40


def default_step_exponent(n: int, eps: float) -> int:
    """Smallest m with 2^-m <= eps / (8 sqrt(2 * 2^n))"""
    return max(0, math.ceil(math.log2(8 * math.sqrt(2 * 2**n) / eps)))


@dataclass(frozen=True)
class GridNetCodec:
    """
    Each real and imaginary amplitude component is rounded to the grid k * step,
    k in [-2^m, 2^m - 1], and written as an (m+1)-bit offset

    `step_exponent` defaults to the smallest m with 2^-m <= eps / (8 sqrt(2 * 2^n)).
    """

    n: int
    eps: float
    step_exponent: int | None = None
    quant_step: float = field(init=False)
    bits_per_amplitude: int = field(init=False)
    total_bits: int = field(init=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError("qubit count must be non-negative")
        if not 0 < self.eps <= 2:
            raise ValidationError(f"eps={self.eps} outside (0, 2]")
        m = self.step_exponent if self.step_exponent is not None else default_step_exponent(self.n, self.eps)
        if m < 0:
            raise ValidationError("step exponent must be non-negative")
        object.__setattr__(self, "step_exponent", m)
        object.__setattr__(self, "quant_step", 2.0**-m)
        object.__setattr__(self, "bits_per_amplitude", m + 1)
        object.__setattr__(self, "total_bits", 2 * self.dimension * (m + 1))

    @property
    def dimension(self) -> int:
        return 2**self.n

    @property
    def levels(self) -> int:
        return 2**self.step_exponent

    def with_exponent(self, m: int) -> "GridNetCodec":
        return GridNetCodec(self.n, self.eps, m)

    def rounding_distance(self) -> float:
        """Euclidean bound on |v - psi| for the unnormalized grid vector v (clamping at +1 included)"""
        return self.quant_step / 2 * math.sqrt(2 * self.dimension) + self.quant_step / 2

    def analytic_trace_norm_bound(self) -> float:
        """Renormalizing at most doubles the distance; the trace norm of the projector gap is at most 2x that"""
        return 4 * self.rounding_distance()


def _components(psi: PureState) -> np.ndarray:
    amps = psi.canonical().amplitudes
    return np.concatenate([amps.real, amps.imag])


def grid_indices(psi: PureState, codec: GridNetCodec) -> np.ndarray:
    """Signed grid index of every component"""
    if psi.dimension != codec.dimension:
        raise DimensionError(f"state dimension {psi.dimension} != codec dimension {codec.dimension}")
    comps = _components(psi)
    if np.max(np.abs(comps)) > 1 + AMPLITUDE_TOL:
        raise EncodingError("amplitude component outside [-1, 1]")
    k = np.round(comps / codec.quant_step)
    return np.clip(k, -codec.levels, codec.levels - 1).astype(np.int64)


def grid_encode(psi: PureState, codec: GridNetCodec) -> str:
    """
    Fixed-width encoding of the grid point nearest to psi

    Args:
        psi: state of dimension 2^n (its global phase is canonicalized first)
        codec: the grid

    Returns:
        str: '0'/'1' string of length codec.total_bits, component by component, low bit first
    """
    offsets = grid_indices(psi, codec) + codec.levels
    width = codec.bits_per_amplitude
    bits = (offsets[:, None] >> np.arange(width)) & 1
    return "".join("1" if b else "0" for b in bits.reshape(-1))


def grid_decode(bits: str, codec: GridNetCodec) -> PureState:
    """Inverse of `grid_encode` up to rounding: the renormalized grid vector"""
    if len(bits) != codec.total_bits:
        raise EncodingError(f"expected {codec.total_bits} bits, got {len(bits)}")
    if set(bits) - {"0", "1"}:
        raise EncodingError("bitstring may only contain 0 and 1")
    width = codec.bits_per_amplitude
    raw = np.array([c == "1" for c in bits], dtype=np.int64).reshape(-1, width)
    offsets = raw @ (np.int64(1) << np.arange(width, dtype=np.int64))
    values = (offsets - codec.levels) * codec.quant_step
    dim = codec.dimension
    return PureState.from_vector(values[:dim] + 1j * values[dim:])


def to_hex(bits: str) -> str:
    """Pack a bitstring (first character most significant) into hex"""
    width = math.ceil(len(bits) / 4)
    return format(int(bits, 2), f"0{width}x") if bits else ""


def from_hex(text: str, length: int) -> str:
    return format(int(text, 16), f"0{length}b") if text else ""


def empirical_trace_norm_error(codec: GridNetCodec, rng: np.random.Generator,
                               samples: int = CALIBRATION_SAMPLES) -> float:
    """Largest 2 * trace distance between a Haar state and its decoded grid state"""
    worst = 0.0
    for amps in haar_batch(codec.dimension, samples, rng):
        psi = PureState(amps)
        decoded = grid_decode(grid_encode(psi, codec), codec)
        worst = max(worst, 2 * psi.trace_distance(decoded))
    return worst


def calibrate_codec(n: int, eps: float, rng: np.random.Generator,
                    samples: int = CALIBRATION_SAMPLES) -> GridNetCodec:
    """
    Start at the default step and move it by powers of two

    The step is loosened while the analytic bound stays at most eps and the
    empirical trace-norm error stays at most eps/2; a starting step that fails
    either test is tightened until both pass.
    """
    codec = GridNetCodec(n, eps)

    def passes(candidate):
        return (candidate.analytic_trace_norm_bound() <= eps
                and empirical_trace_norm_error(candidate, rng, samples) <= eps / 2)

    for _ in range(MAX_CALIBRATION_STEPS):
        if passes(codec):
            break
        codec = codec.with_exponent(codec.step_exponent + 1)
    else:
        raise ValidationError(f"no grid step passed calibration for n={n}, eps={eps}")
    while codec.step_exponent > 0 and passes(codec.with_exponent(codec.step_exponent - 1)):
        codec = codec.with_exponent(codec.step_exponent - 1)
    logger.info("calibrated grid for n=%d eps=%g: step 2^-%d, %d bits", n, eps, codec.step_exponent, codec.total_bits)
    return codec


def dqs_epsnet_protocol(inst: DqsInstance, codec: GridNetCodec, rng: np.random.Generator):
    """
    Alice sends the grid encoding of psi; Bob measures the decoded state with M

    Returns:
        tuple: (sampled outcome, ProtocolRun); run.details carries the exact l1
        distance between Bob's outcome law and the true one
    """
    if inst.psi.dimension != codec.dimension:
        raise ValidationError(f"codec dimension {codec.dimension} does not match instance {inst.psi.dimension}")
    run = ProtocolRun(protocol="dqs-epsnet")
    bits = grid_encode(inst.psi, codec)
    run.send_bits(ALICE, (1 if c == "1" else 0 for c in bits))
    decoded = grid_decode("".join(str(b) for b in run.transcript), codec)
    realized = dqs_distribution(DqsInstance(decoded, inst.m))
    exact = dqs_distribution(inst)
    outcome = int(realized.sample(rng, 1)[0])
    run.output = outcome
    run.details["l1_error"] = l1_distance(realized, exact)
    run.details["encoded"] = to_hex(bits)
    return outcome, run


def net_bit_comparison(n: int, eps: float) -> dict:
    """Grid cost against the (5/eps)^{2^{n+1}} net size and the volume lower bound (1/eps)^{2^n}"""
    codec = GridNetCodec(n, eps)
    return {
        "n": n,
        "eps": eps,
        "grid_bits": codec.total_bits,
        "net_bits": 2 ** (n + 1) * math.log2(5 / eps),
        "volume_lower_bits": 2**n * math.log2(1 / eps),
    }
