import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core_math.errors import CapacityError, DomainError, ValidationError
from lemma_lab.xi import xi_sample_batch
from protocol_framework.accounting import acceptance_accounting, direct_acceptance, uniform_mu
from protocol_framework.rectangles import (
    Rectangle,
    cube_points,
    decompose_to_rectangles,
    rect_measure,
    rect_measure_direct,
    rect_measure_exact,
    sign_index,
)
from protocol_framework.runs import ALICE, BOB, ProtocolRun, index_bits
from protocol_framework.tree import (
    Node,
    ProtocolTree,
    RandomizedProtocol,
    constant_tree,
    load_tree,
    random_protocol,
    random_tree,
    save_tree,
)


def first_bit_equality_tree(size=4):
    """Alice sends bit 0 of x, Bob sends bit 0 of y, accept iff they match"""
    table = tuple(i & 1 for i in range(size))
    nodes = (
        Node(speaker=ALICE, table=table, children=(1, 2)),
        Node(speaker=BOB, table=table, children=(3, 4)),
        Node(speaker=BOB, table=table, children=(5, 6)),
        Node(accept=True),
        Node(accept=False),
        Node(accept=False),
        Node(accept=True),
    )
    return ProtocolTree(nodes, size, size, 2)


def test_index_bits():
    assert index_bits(1) == 0
    assert index_bits(2) == 1
    assert index_bits(4096) == 12
    assert index_bits(5) == 3
    with pytest.raises(ValidationError):
        index_bits(0)


def test_run_accounting_matches_transcript():
    run = ProtocolRun("toy")
    run.send_index(ALICE, 5, 8)
    run.send_bit(BOB, 1)
    assert run.bits_sent == 4
    assert run.transcript == [1, 0, 1, 1]
    assert run.to_record()["bits_alice"] == 3
    with pytest.raises(ValidationError):
        run.send_bit("carol", 0)


def test_tree_validation():
    with pytest.raises(ValidationError):
        ProtocolTree((Node(speaker=ALICE, table=(0, 1), children=(1, 2)), Node(accept=True), Node(accept=False)), 4, 4, 1)
    with pytest.raises(ValidationError):
        ProtocolTree((Node(),), 2, 2, 0)
    with pytest.raises(ValidationError):
        first_bit_equality_tree().__class__(first_bit_equality_tree().nodes, 4, 4, 1)


def test_play_records_bits():
    tree = first_bit_equality_tree()
    run = tree.play(1, 3)
    assert run.output is True
    assert run.bits_sent == 2
    assert not tree.accepts(0, 1)


def test_tree_json_round_trip(tmp_path, rng):
    tree = random_tree(8, 8, 4, rng)
    path = tmp_path / "tree.json"
    save_tree(tree, path)
    loaded = load_tree(path)
    assert loaded == tree


def test_depth_zero_tree_is_one_rectangle():
    leaves = decompose_to_rectangles(constant_tree(4, 4))
    assert len(leaves) == 1
    assert leaves[0].accept
    assert leaves[0].rectangle.size == 16


def test_depth_one_alice_split():
    table = tuple(i & 1 for i in range(4))
    tree = ProtocolTree((Node(speaker=ALICE, table=table, children=(1, 2)), Node(accept=True), Node(accept=False)), 4, 4, 1)
    leaves = decompose_to_rectangles(tree)
    assert [leaf.rectangle.alice_mask.tolist() for leaf in leaves] == [[True, False, True, False], [False, True, False, True]]
    assert all(leaf.rectangle.bob_mask.all() for leaf in leaves)


@pytest.mark.parametrize("seed", range(50))
def test_rectangles_partition_and_replay(seed):
    rng = np.random.default_rng(seed)
    tree = random_tree(64, 64, 6, rng)
    leaves = decompose_to_rectangles(tree)
    cover = np.zeros((64, 64), dtype=int)
    for leaf in leaves:
        cover += np.outer(leaf.rectangle.alice_mask, leaf.rectangle.bob_mask)
    assert (cover == 1).all()
    by_leaf = {leaf.leaf: leaf.rectangle for leaf in leaves}
    for x in range(0, 64, 7):
        for y in range(0, 64, 5):
            assert by_leaf[tree.play(x, y).details["leaf"]].contains_index(x, y)


def test_decompose_capacity_guard():
    with pytest.raises(CapacityError):
        decompose_to_rectangles(constant_tree(2**13, 2**13))


def test_randomized_protocol_weights():
    with pytest.raises(ValidationError):
        RandomizedProtocol(((constant_tree(2, 2), 0.4),))


def test_always_accepting_protocol_totals_one(rng):
    mu = rng.random((4, 4))
    mu /= mu.sum()
    result = acceptance_accounting(RandomizedProtocol(((constant_tree(4, 4), 1.0),)), mu)
    assert result.total == pytest.approx(1.0)
    assert result.identity_holds


def test_first_bit_equality_is_half_under_uniform():
    protocol = RandomizedProtocol(((first_bit_equality_tree(), 1.0),))
    result = acceptance_accounting(protocol, uniform_mu(4, 4))
    assert result.total == pytest.approx(0.5)
    assert result.eta == 0.0


def test_accounting_rejects_unnormalized_mu():
    protocol = RandomizedProtocol(((constant_tree(2, 2), 1.0),))
    with pytest.raises(ValidationError):
        acceptance_accounting(protocol, np.ones((2, 2)))


@pytest.mark.parametrize("seed", range(20))
def test_accounting_matches_direct_replay(seed):
    rng = np.random.default_rng(seed)
    protocol = random_protocol(32, 32, 5, 3, rng)
    mu = uniform_mu(32, 32)
    result = acceptance_accounting(protocol, mu)
    assert result.total == pytest.approx(direct_acceptance(protocol, mu), abs=1e-12)
    assert result.identity_holds


def test_cube_points_and_sign_index():
    points = cube_points(3)
    assert points.shape == (8, 3)
    assert points[1].tolist() == [-1, 1, 1]
    assert sign_index(points).tolist() == list(range(8))


def test_full_rectangle_has_measure_one():
    for p in (-1.0, -0.3, 0.0, 0.7, 1.0):
        assert rect_measure_exact(Rectangle.full(4), p) == pytest.approx(1.0)


def test_single_point_times_full_is_quarter():
    alice = np.zeros(4, bool)
    alice[0] = True
    rect = Rectangle.from_masks(alice, np.ones(4, bool))
    assert rect_measure_exact(rect, 0.0) == pytest.approx(0.25)


def test_measure_domain():
    with pytest.raises(DomainError):
        rect_measure_exact(Rectangle.full(2), 1.5)
    with pytest.raises(ValidationError):
        rect_measure(Rectangle.full(2), 0.1, mode="mc")


@given(st.integers(min_value=0, max_value=2**31), st.floats(min_value=-1.0, max_value=1.0))
@settings(max_examples=40, deadline=None)
def test_fourier_measure_matches_pair_sum(seed, p):
    rng = np.random.default_rng(seed)
    rect = Rectangle.from_masks(rng.random(32) < 0.5, rng.random(32) < 0.5)
    assert rect_measure_exact(rect, p) == pytest.approx(rect_measure_direct(rect, p), abs=1e-12)


def test_exact_against_monte_carlo(rng):
    alice = np.zeros(256, bool)
    alice[rng.choice(256, 40, replace=False)] = True
    bob = np.zeros(256, bool)
    bob[rng.choice(256, 40, replace=False)] = True
    rect = Rectangle.from_masks(alice, bob, N=8)
    exact = rect_measure(rect, 0.3).value
    mc = rect_measure(rect, 0.3, mode="mc", samples=1_000_000, rng=rng)
    assert abs(mc.value - exact) <= 4 * mc.stderr + 1e-9


def test_predicate_rectangle_mc(rng):
    rect = Rectangle.from_predicates(lambda xs: xs[:, 0] > 0, lambda ys: ys[:, 0] > 0, N=16)
    mc = rect_measure(rect, 0.5, mode="mc", samples=200_000, rng=rng)
    # Pr[x1 = +1, y1 = +1] = 1/2 * 3/4
    assert abs(mc.value - 0.375) <= 4 * mc.stderr
    xs, ys = xi_sample_batch(16, 0.5, 10, rng)
    assert rect.contains(xs, ys).shape == (10,)
