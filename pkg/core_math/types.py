"""
Domain value types: sign vectors, pure states, measurements and outcome distributions

Bit-string convention used everywhere: an index x in [0, 2^n) stands for the bit
string whose bit i is (x >> i) & 1 (little-endian), and s.x is the parity of
popcount(s & x).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from core_math.errors import DimensionError, ValidationError

NORM_TOL = 1e-10
OPERATOR_TOL = 1e-9
PROB_CLAMP = 1e-12
PROB_TOTAL_TOL = 1e-9


@dataclass(frozen=True)
class SignVector:
    """A string in {-1,+1}^N, used as a boolean function table when N = 2^n"""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries)
        if entries.ndim != 1 or entries.size < 1:
            raise DimensionError("sign vector must be a non-empty 1-d sequence")
        if not np.all(np.abs(entries) == 1):
            raise ValidationError("sign vector entries must all be +1 or -1")
        entries = entries.astype(np.int8)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "SignVector":
        """Map bits b to signs (-1)^b"""
        return cls(1 - 2 * np.asarray(list(bits), dtype=np.int8))

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> "SignVector":
        return cls(rng.choice(np.array([-1, 1], dtype=np.int8), size=length))

    def __len__(self) -> int:
        return int(self.entries.size)

    def __mul__(self, other: "SignVector") -> "SignVector":
        if len(self) != len(other):
            raise DimensionError("pointwise product needs equal lengths")
        return SignVector(self.entries * other.entries)

    def __neg__(self) -> "SignVector":
        return SignVector(-self.entries)

    def inner_product(self, other: "SignVector") -> int:
        if len(self) != len(other):
            raise DimensionError("inner product needs equal lengths")
        return int(np.dot(self.entries.astype(np.int64), other.entries.astype(np.int64)))

    def to_list(self) -> list[int]:
        return [int(v) for v in self.entries]


@dataclass(frozen=True)
class PureState:
    """Unit vector of N complex amplitudes"""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size < 1:
            raise DimensionError("state needs at least one amplitude")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state norm {norm:.3e} is not 1")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vector) -> "PureState":
        """Normalize an arbitrary nonzero vector into a state"""
        vec = np.asarray(vector, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValidationError("cannot normalize the zero vector")
        return cls(vec / norm)

    @classmethod
    def basis(cls, dimension: int, index: int = 0) -> "PureState":
        vec = np.zeros(dimension, dtype=np.complex128)
        vec[index] = 1.0
        return cls(vec)

    @property
    def dimension(self) -> int:
        return int(self.amplitudes.size)

    @property
    def is_canonical(self) -> bool:
        nz = np.flatnonzero(self.amplitudes)
        if nz.size == 0:
            return False
        first = self.amplitudes[nz[0]]
        return first.imag == 0 and first.real >= 0

    def canonical(self) -> "PureState":
        """Rotate the global phase so the first nonzero amplitude is real and >= 0"""
        nz = np.flatnonzero(self.amplitudes)
        first = self.amplitudes[nz[0]]
        rotated = self.amplitudes * (np.conj(first) / abs(first))
        rotated[nz[0]] = abs(first)
        return PureState(rotated)

    def overlap(self, other: "PureState") -> complex:
        """<self|other>"""
        if self.dimension != other.dimension:
            raise DimensionError("overlap needs equal dimensions")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def trace_distance(self, other: "PureState") -> float:
        """Half the trace norm of the difference of the two projectors"""
        fidelity = min(1.0, abs(self.overlap(other)) ** 2)
        return float(np.sqrt(1.0 - fidelity))


@dataclass(frozen=True)
class Measurement:
    """POVM on C^N; kind is 'projective' (two outcomes {M, I-M}) or 'povm'"""

    operators: tuple
    kind: str = "povm"

    def __post_init__(self):
        ops = tuple(np.asarray(op, dtype=np.complex128) for op in self.operators)
        if not ops:
            raise ValidationError("measurement needs at least one operator")
        dim = ops[0].shape[0]
        for op in ops:
            if op.shape != (dim, dim):
                raise DimensionError("all operators must be square of the same size")
            if not np.allclose(op, op.conj().T, atol=OPERATOR_TOL):
                raise ValidationError("operators must be Hermitian")
            if np.linalg.eigvalsh(op).min() < -OPERATOR_TOL:
                raise ValidationError("operators must be positive semidefinite")
        total = sum(ops)
        if np.abs(total - np.eye(dim)).max() > OPERATOR_TOL:
            raise ValidationError("operators must sum to the identity")
        if self.kind not in ("projective", "povm"):
            raise ValidationError(f"unknown measurement kind {self.kind!r}")
        if self.kind == "projective":
            if len(ops) != 2:
                raise ValidationError("projective measurement has exactly two outcomes")
            if np.abs(ops[0] @ ops[0] - ops[0]).max() > OPERATOR_TOL:
                raise ValidationError("projective operator must satisfy M^2 = M")
        object.__setattr__(self, "operators", ops)

    @classmethod
    def projector_pair(cls, projector) -> "Measurement":
        """Two-outcome measurement {M, I-M}; outcome 0 is M"""
        m = np.asarray(projector, dtype=np.complex128)
        return cls((m, np.eye(m.shape[0]) - m), kind="projective")

    @classmethod
    def computational_basis(cls, dimension: int) -> "Measurement":
        ops = []
        for j in range(dimension):
            op = np.zeros((dimension, dimension), dtype=np.complex128)
            op[j, j] = 1.0
            ops.append(op)
        return cls(tuple(ops))

    @property
    def dimension(self) -> int:
        return int(self.operators[0].shape[0])

    @property
    def projector(self) -> np.ndarray:
        """The M of a two-outcome projective measurement"""
        if self.kind != "projective":
            raise ValidationError("only projective measurements expose a projector")
        return self.operators[0]

    @property
    def outcomes(self) -> int:
        return len(self.operators)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Finite pmf over integer outcome indices"""

    probabilities: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for key, value in self.probabilities.items():
            value = float(value)
            if value < -PROB_CLAMP:
                raise ValidationError(f"negative probability {value} for outcome {key}")
            cleaned[int(key)] = max(value, 0.0)
        total = sum(cleaned.values())
        if abs(total - 1.0) > PROB_TOTAL_TOL:
            raise ValidationError(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "probabilities", cleaned)

    @classmethod
    def from_array(cls, values) -> "OutcomeDistribution":
        return cls({i: float(v) for i, v in enumerate(np.asarray(values, dtype=float))})

    @classmethod
    def from_samples(cls, samples, size: int | None = None) -> "OutcomeDistribution":
        """Empirical pmf of integer samples"""
        samples = np.asarray(samples, dtype=np.int64)
        counts = np.bincount(samples, minlength=size or 0)
        return cls.from_array(counts / samples.size)

    def get(self, outcome: int) -> float:
        return self.probabilities.get(int(outcome), 0.0)

    def to_array(self, size: int | None = None) -> np.ndarray:
        size = size if size is not None else (max(self.probabilities) + 1 if self.probabilities else 0)
        out = np.zeros(size)
        for key, value in self.probabilities.items():
            if key < size:
                out[key] = value
        return out

    def support(self) -> list[int]:
        return sorted(k for k, v in self.probabilities.items() if v > 0)

    def sample(self, rng: np.random.Generator, shots: int) -> np.ndarray:
        keys = np.array(sorted(self.probabilities), dtype=np.int64)
        probs = np.array([self.probabilities[k] for k in keys])
        return rng.choice(keys, size=shots, p=probs / probs.sum())
