import itertools

import numpy as np
import pytest

from core_math.distributions import l1_distance
from core_math.errors import CapacityError, DimensionError, ValidationError
from core_math.states import haar_random_state, random_povm
from core_math.types import Measurement, OutcomeDistribution, PureState, SignVector
from quantum_protocols.ddfs import (
    ddfs_joint_pmf,
    ddfs_quantum_sample,
    ddfs_statevector_pmf,
    xor_pushforward,
)
from quantum_protocols.dfs import (
    dfs_distribution,
    dfs_distribution_naive,
    dfs_quantum_simulate,
    dfs_statevector_pmf,
    relabel_for_target,
    sampler_to_acceptance,
    target_acceptance,
)
from quantum_protocols.dqs import dqs_distribution, povm_probabilities
from quantum_protocols.instances import (
    DfsInstance,
    DqsInstance,
    load_instance,
    read_samples_csv,
    save_instance,
    write_samples_csv,
)
from quantum_protocols.statevector import apply_hadamards, born_probabilities


def test_instance_validation():
    with pytest.raises(ValidationError):
        DfsInstance.from_lists([1, 1], [1, 1, 1, 1])
    with pytest.raises(DimensionError):
        DfsInstance.from_lists([1, 1, 1], [1, 1, 1])
    with pytest.raises(DimensionError):
        DqsInstance(PureState.basis(2), Measurement.computational_basis(4))


def test_instance_file_round_trip(tmp_path, rng):
    inst = DfsInstance.random(3, rng)
    path = tmp_path / "inst.json"
    save_instance(inst, path)
    loaded = load_instance(path)
    assert loaded.f.to_list() == inst.f.to_list()
    assert loaded.g.to_list() == inst.g.to_list()


def test_samples_csv(tmp_path):
    path = tmp_path / "pairs.csv"
    assert write_samples_csv([(0, 3), (2, 1)], path) == 2
    assert read_samples_csv(path) == [(0, 3), (2, 1)]


def test_equal_inputs_give_point_mass(rng):
    f = SignVector.random(8, rng)
    assert dfs_distribution(DfsInstance(f, f)).support() == [0]


def test_parity_product_on_one_bit():
    pmf = dfs_distribution(DfsInstance.from_lists([1, 1], [1, -1]))
    assert pmf.get(0) == pytest.approx(0.0)
    assert pmf.get(1) == pytest.approx(1.0)


def test_closed_form_against_double_sum(rng):
    inst = DfsInstance.random(3, rng)
    np.testing.assert_allclose(dfs_distribution(inst).to_array(8), dfs_distribution_naive(inst), atol=1e-12)


def test_statevector_pipeline_matches_closed_form(rng):
    inst = DfsInstance.random(2, rng)
    pipeline = OutcomeDistribution.from_array(dfs_statevector_pmf(inst))
    assert l1_distance(pipeline, dfs_distribution(inst)) <= 1e-10


def test_hadamards_on_zero_state_are_uniform():
    state = np.zeros(8, dtype=complex)
    state[0] = 1.0
    np.testing.assert_allclose(born_probabilities(apply_hadamards(state, range(3), 3)), np.full(8, 1 / 8))


def test_simulation_equal_inputs(rng):
    f = SignVector.random(4, rng)
    empirical = dfs_quantum_simulate(DfsInstance(f, f), rng, 100)
    assert empirical.support() == [0]


def test_simulation_converges(rng):
    inst = DfsInstance.random(2, rng)
    empirical = dfs_quantum_simulate(inst, rng, 100_000)
    assert l1_distance(empirical, dfs_distribution(inst)) <= 0.02
    with pytest.raises(ValidationError):
        dfs_quantum_simulate(inst, rng, 0)


def test_target_relabeling(rng):
    x = SignVector.random(8, rng)
    y = SignVector.random(8, rng)
    pmf = dfs_distribution(DfsInstance(x, y))
    for s in range(8):
        relabeled = dfs_distribution(DfsInstance(relabel_for_target(x, s), y))
        assert relabeled.get(0) == pytest.approx(pmf.get(s))
        assert sampler_to_acceptance(pmf, s) == pytest.approx(target_acceptance(x, y, s))


def test_dqs_computational_basis_of_zero():
    pmf = dqs_distribution(DqsInstance(PureState.basis(4), Measurement.computational_basis(4)))
    assert pmf.to_array(4).tolist() == [1.0, 0.0, 0.0, 0.0]


def test_dqs_projector_containing_state():
    projector = np.diag([1.0, 1.0, 0.0, 0.0])
    psi = PureState.from_vector([1.0, 1.0j, 0.0, 0.0])
    pmf = dqs_distribution(DqsInstance(psi, Measurement.projector_pair(projector)))
    assert pmf.get(0) == pytest.approx(1.0)
    assert pmf.get(1) == pytest.approx(0.0, abs=1e-12)


def test_dqs_random_povm_matches_quadratic_form(rng):
    psi = haar_random_state(8, rng)
    m = random_povm(8, 4, rng)
    probs = povm_probabilities(psi, m.operators)
    assert probs.sum() == pytest.approx(1.0, abs=1e-10)
    for op, value in zip(m.operators, probs):
        direct = np.real(psi.amplitudes.conj() @ op @ psi.amplitudes)
        assert value == pytest.approx(direct, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_ddfs_joint_matches_entangled_circuit(n, rng):
    inst = DfsInstance.random(n, rng)
    np.testing.assert_allclose(ddfs_statevector_pmf(inst), ddfs_joint_pmf(inst), atol=1e-12)


def test_ddfs_statevector_capacity(rng):
    with pytest.raises(CapacityError):
        ddfs_statevector_pmf(DfsInstance.random(5, rng))


def test_ddfs_pushforward_is_dfs_law(rng):
    inst = DfsInstance.random(2, rng)
    np.testing.assert_allclose(xor_pushforward(ddfs_joint_pmf(inst)), dfs_distribution(inst).to_array(4), atol=1e-12)


def test_ddfs_samples_equal_inputs(rng):
    f = SignVector.random(4, rng)
    assert all(s == t for s, t in ddfs_quantum_sample(DfsInstance(f, f), rng, 200))


def test_ddfs_samples_parity_instance(rng):
    pairs = ddfs_quantum_sample(DfsInstance.from_lists([1, 1], [1, -1]), rng, 200)
    assert all(s ^ t == 1 for s, t in pairs)


def test_ddfs_sample_laws(rng):
    inst = DfsInstance.random(2, rng)
    pairs = ddfs_quantum_sample(inst, rng, 100_000)
    xor_law = OutcomeDistribution.from_samples([s ^ t for s, t in pairs], 4)
    marginal = OutcomeDistribution.from_samples([s for s, _ in pairs], 4)
    assert l1_distance(xor_law, dfs_distribution(inst)) <= 0.02
    assert l1_distance(marginal, OutcomeDistribution.from_array(np.full(4, 0.25))) <= 0.02


def _all_instances(n):
    tables = [SignVector.from_bits((index >> i) & 1 for i in range(2**n)) for index in range(2 ** 2**n)]
    return [DfsInstance(f, g) for f, g in itertools.product(tables, repeat=2)]


def _assert_three_way_agreement(inst):
    closed = dfs_distribution(inst)
    assert l1_distance(OutcomeDistribution.from_array(dfs_distribution_naive(inst)), closed) <= 1e-10
    assert l1_distance(OutcomeDistribution.from_array(dfs_statevector_pmf(inst)), closed) <= 1e-10


def test_every_two_qubit_instance_agrees():
    instances = _all_instances(2)
    assert len(instances) == 256
    for inst in instances:
        _assert_three_way_agreement(inst)


@pytest.mark.slow
@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_random_instances_agree(n, rng):
    for _ in range(1000):
        _assert_three_way_agreement(DfsInstance.random(n, rng))


@pytest.mark.parametrize("n", [1, 2])
def test_ddfs_marginals_uniform_on_every_instance(n):
    size = 2**n
    for inst in _all_instances(n):
        joint = ddfs_joint_pmf(inst)
        np.testing.assert_allclose(joint.sum(axis=1), np.full(size, 1 / size), atol=1e-12)
        np.testing.assert_allclose(joint.sum(axis=0), np.full(size, 1 / size), atol=1e-12)
        np.testing.assert_allclose(xor_pushforward(joint), dfs_distribution(inst).to_array(size), atol=1e-12)


def test_ddfs_circuit_marginals_uniform_at_three(rng):
    for _ in range(20):
        joint = ddfs_statevector_pmf(DfsInstance.random(3, rng))
        np.testing.assert_allclose(joint.sum(axis=1), np.full(8, 1 / 8), atol=1e-12)
        np.testing.assert_allclose(joint.sum(axis=0), np.full(8, 1 / 8), atol=1e-12)
