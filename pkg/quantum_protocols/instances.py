"""
Problem instances for the sampling protocols, and their file forms
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from core_math.errors import DimensionError, ValidationError
from core_math.states import haar_random_state, random_povm
from core_math.types import Measurement, PureState, SignVector
from core_math.walsh import qubit_count


@dataclass(frozen=True)
class DfsInstance:
    """Alice's f and Bob's g, both sign tables over {0,1}^n"""

    f: SignVector
    g: SignVector

    def __post_init__(self):
        if len(self.f) != len(self.g):
            raise ValidationError(f"f has length {len(self.f)} but g has length {len(self.g)}")
        qubit_count(len(self.f))

    @property
    def n(self) -> int:
        return qubit_count(len(self.f))

    @property
    def size(self) -> int:
        return len(self.f)

    @classmethod
    def from_lists(cls, f, g) -> "DfsInstance":
        return cls(SignVector(np.asarray(f)), SignVector(np.asarray(g)))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "DfsInstance":
        return cls(SignVector.random(2**n, rng), SignVector.random(2**n, rng))

    def to_json(self) -> dict:
        return {"n": self.n, "f": self.f.to_list(), "g": self.g.to_list()}

    @classmethod
    def from_json(cls, data: dict) -> "DfsInstance":
        inst = cls.from_lists(data["f"], data["g"])
        if "n" in data and int(data["n"]) != inst.n:
            raise ValidationError(f"declared n={data['n']} does not match table length {inst.size}")
        return inst


@dataclass(frozen=True)
class DqsInstance:
    """Alice's state psi and Bob's measurement M"""

    psi: PureState
    m: Measurement

    def __post_init__(self):
        if self.psi.dimension != self.m.dimension:
            raise DimensionError(f"state dimension {self.psi.dimension} != measurement dimension {self.m.dimension}")

    @classmethod
    def random(cls, dimension: int, outcomes: int, rng: np.random.Generator) -> "DqsInstance":
        return cls(haar_random_state(dimension, rng), random_povm(dimension, outcomes, rng))


def load_instance(path: str | Path) -> DfsInstance:
    """Read a DFS instance from a JSON file {"n": ..., "f": [...], "g": [...]}"""
    return DfsInstance.from_json(json.loads(Path(path).read_text()))


def save_instance(inst: DfsInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(inst.to_json()))


def write_samples_csv(pairs, path: str | Path) -> int:
    """
    Write sampled (s, t) pairs as CSV rows (shot, s, t)

    Args:
        pairs: iterable of (s, t) integer pairs
        path: output file

    Returns:
        int: number of rows written
    """
    rows = 0
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["shot", "s", "t"])
        for shot, (s, t) in enumerate(pairs):
            writer.writerow([shot, int(s), int(t)])
            rows += 1
    return rows


def read_samples_csv(path: str | Path) -> list[tuple[int, int]]:
    with open(path, newline="") as handle:
        return [(int(row["s"]), int(row["t"])) for row in csv.DictReader(handle)]
