"""
Deterministic protocol trees and their shared-randomness mixtures
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from core_math.errors import ValidationError
from protocol_framework.runs import ALICE, BOB, ProtocolRun

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class Node:
    """
    Internal node: `speaker` sends table[input] and play moves to children[bit].
    Leaf: speaker is None and `accept` is the decision.
    """

    speaker: str | None = None
    table: tuple = ()
    children: tuple = ()
    accept: bool | None = None

    @property
    def is_leaf(self) -> bool:
        return self.speaker is None


@dataclass(frozen=True)
class ProtocolTree:
    """Binary protocol tree over input domains X = range(n_alice), Y = range(n_bob); root is nodes[0]"""

    nodes: tuple
    n_alice: int
    n_bob: int
    depth_bound: int

    def __post_init__(self):
        if not self.nodes:
            raise ValidationError("tree needs at least one node")
        for node in self.nodes:
            if node.is_leaf:
                if node.accept is None:
                    raise ValidationError("leaf must carry an accept decision")
                continue
            if node.speaker not in (ALICE, BOB):
                raise ValidationError(f"unknown speaker {node.speaker!r}")
            size = self.n_alice if node.speaker == ALICE else self.n_bob
            if len(node.table) != size:
                raise ValidationError("message table must cover the speaker's whole domain")
            if len(node.children) != 2:
                raise ValidationError("internal node needs two children")
        if self.depth() > self.depth_bound:
            raise ValidationError(f"tree depth {self.depth()} exceeds bound {self.depth_bound}")

    def depth(self, index: int = 0) -> int:
        node = self.nodes[index]
        if node.is_leaf:
            return 0
        return 1 + max(self.depth(c) for c in node.children)

    def leaf_count(self) -> int:
        return sum(1 for node in self.nodes if node.is_leaf)

    def play(self, x: int, y: int, run: ProtocolRun | None = None) -> ProtocolRun:
        """Replay the tree on inputs (x, y), recording every bit sent"""
        run = run if run is not None else ProtocolRun(protocol="tree")
        index = 0
        node = self.nodes[index]
        while not node.is_leaf:
            bit = node.table[x] if node.speaker == ALICE else node.table[y]
            run.send_bit(node.speaker, bit)
            index = node.children[int(bit)]
            node = self.nodes[index]
        run.output = bool(node.accept)
        run.details["leaf"] = index
        return run

    def accepts(self, x: int, y: int) -> bool:
        return bool(self.play(x, y).output)

    def to_json(self) -> dict:
        nodes = []
        for i, node in enumerate(self.nodes):
            if node.is_leaf:
                nodes.append({"id": i, "accept": bool(node.accept)})
            else:
                nodes.append({
                    "id": i,
                    "speaker": node.speaker,
                    "table": [int(b) for b in node.table],
                    "children": [int(c) for c in node.children],
                })
        return {"n_alice": self.n_alice, "n_bob": self.n_bob, "depth": self.depth_bound, "nodes": nodes}

    @classmethod
    def from_json(cls, data: dict) -> "ProtocolTree":
        ordered = sorted(data["nodes"], key=lambda item: item["id"])
        nodes = []
        for item in ordered:
            if "accept" in item:
                nodes.append(Node(accept=bool(item["accept"])))
            else:
                nodes.append(Node(
                    speaker=item["speaker"],
                    table=tuple(int(b) for b in item["table"]),
                    children=tuple(int(c) for c in item["children"]),
                ))
        return cls(tuple(nodes), int(data["n_alice"]), int(data["n_bob"]), int(data["depth"]))


@dataclass(frozen=True)
class RandomizedProtocol:
    """Finite mixture of deterministic trees with weights pi(D)"""

    support: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not self.support:
            raise ValidationError("randomized protocol needs at least one tree")
        total = sum(w for _, w in self.support)
        if any(w < 0 for _, w in self.support) or abs(total - 1.0) > WEIGHT_TOL:
            raise ValidationError(f"tree weights must be non-negative and sum to 1 (got {total})")
        first = self.support[0][0]
        for tree, _ in self.support:
            if (tree.n_alice, tree.n_bob) != (first.n_alice, first.n_bob):
                raise ValidationError("all trees must share the input domains")

    @property
    def depth_bound(self) -> int:
        return max(tree.depth_bound for tree, _ in self.support)

    @property
    def n_alice(self) -> int:
        return self.support[0][0].n_alice

    @property
    def n_bob(self) -> int:
        return self.support[0][0].n_bob

    def acceptance_probability(self, x: int, y: int) -> float:
        return float(sum(w for tree, w in self.support if tree.accepts(x, y)))

    def acceptance_matrix(self) -> np.ndarray:
        """Pr[accept] for every input pair, by direct replay"""
        out = np.zeros((self.n_alice, self.n_bob))
        for x in range(self.n_alice):
            for y in range(self.n_bob):
                out[x, y] = self.acceptance_probability(x, y)
        return out


def constant_tree(n_alice: int, n_bob: int, accept: bool = True) -> ProtocolTree:
    return ProtocolTree((Node(accept=accept),), n_alice, n_bob, 0)


def random_tree(n_alice: int, n_bob: int, depth: int, rng: np.random.Generator, stop_prob: float = 0.2) -> ProtocolTree:
    """
    Random tree of depth <= `depth`: speakers and message tables uniform,
    each non-root node turns into a random leaf with probability `stop_prob`
    """
    nodes: list = []

    def build(level: int) -> int:
        index = len(nodes)
        nodes.append(None)
        if level == depth or (level > 0 and rng.random() < stop_prob):
            nodes[index] = Node(accept=bool(rng.integers(2)))
            return index
        speaker = ALICE if rng.integers(2) == 0 else BOB
        size = n_alice if speaker == ALICE else n_bob
        table = tuple(int(b) for b in rng.integers(0, 2, size=size))
        left = build(level + 1)
        right = build(level + 1)
        nodes[index] = Node(speaker=speaker, table=table, children=(left, right))
        return index

    build(0)
    return ProtocolTree(tuple(nodes), n_alice, n_bob, depth)


def random_protocol(n_alice: int, n_bob: int, depth: int, trees: int, rng: np.random.Generator) -> RandomizedProtocol:
    weights = rng.random(trees)
    weights = weights / weights.sum()
    # pin the sum to 1 exactly after float division
    weights[-1] = 1.0 - weights[:-1].sum()
    return RandomizedProtocol(tuple((random_tree(n_alice, n_bob, depth, rng), float(w)) for w in weights))


def save_tree(tree: ProtocolTree, path: str | Path) -> None:
    Path(path).write_text(json.dumps(tree.to_json(), indent=2))


def load_tree(path: str | Path) -> ProtocolTree:
    return ProtocolTree.from_json(json.loads(Path(path).read_text()))
