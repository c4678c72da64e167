"""
One function per experiment; each returns (params, metrics) pairs, one per record
"""

from __future__ import annotations

import logging
import math

import numpy as np

from classical_protocols.epsnet import GridNetCodec, calibrate_codec, dqs_epsnet_protocol
from classical_protocols.raz import calibrate_raz, raz_success_rate
from classical_protocols.reductions import ddfs_to_dfs_reduction
from classical_protocols.sampler import cosh_approximation, sqrt_sampler, sqrt_sampler_exact_prob
from core_math.distributions import l1_distance
from core_math.errors import ValidationError
from core_math.states import haar_projective_measurement, haar_random_state, random_povm
from core_math.types import OutcomeDistribution, SignVector
from experiment_runner.config import ExperimentConfig
from lemma_lab.verdicts import CHECKS
from protocol_framework.accounting import acceptance_accounting, direct_acceptance
from protocol_framework.rectangles import cube_points, pair_weight
from protocol_framework.runs import index_bits
from protocol_framework.tree import random_protocol
from quantum_protocols.ddfs import ddfs_quantum_sample
from quantum_protocols.dfs import dfs_distribution, dfs_quantum_simulate
from quantum_protocols.instances import DfsInstance, DqsInstance, load_instance, write_samples_csv

logger = logging.getLogger(__name__)


def _count(config: ExperimentConfig, key: str, default: int, minimum: int = 1) -> int:
    """Integer parameter with a lower bound"""
    value = config.get(key, default, int)
    if value < minimum:
        raise ValidationError(f"{key}={value} must be at least {minimum}")
    return value


def _dfs_instance(config: ExperimentConfig, rng) -> DfsInstance:
    path = config.get("instance")
    if path:
        return load_instance(path)
    return DfsInstance.random(_count(config, "n", 2), rng)


def cmd_dfs_quantum(config: ExperimentConfig, rng):
    inst = _dfs_instance(config, rng)
    shots = _count(config, "shots", 100_000)
    empirical = dfs_quantum_simulate(inst, rng, shots)
    error = l1_distance(empirical, dfs_distribution(inst))
    return [({"n": inst.n, "shots": shots}, {"l1_error": error, "bits_sent": 0})]


def cmd_dqs_epsnet(config: ExperimentConfig, rng):
    n = _count(config, "n", 1)
    eps = config.get("eps", 0.2, float)
    instances = _count(config, "instances", 200)
    outcomes = _count(config, "outcomes", 2, minimum=2)
    dim = 2**n
    codec = calibrate_codec(n, eps, rng) if config.get("calibrate", False) else GridNetCodec(n, eps)
    errors, bits = [], set()
    for _ in range(instances):
        psi = haar_random_state(dim, rng)
        if outcomes == 2:
            m = haar_projective_measurement(dim, max(1, dim // 2), rng)
        else:
            m = random_povm(dim, outcomes, rng)
        _, run = dqs_epsnet_protocol(DqsInstance(psi, m), codec, rng)
        errors.append(run.details["l1_error"])
        bits.add(run.bits_sent)
    metrics = {
        "max_l1_error": max(errors),
        "mean_l1_error": float(np.mean(errors)),
        "bits_sent": codec.total_bits,
        "bits_constant": bits == {codec.total_bits},
        "quant_step": codec.quant_step,
    }
    return [({"n": n, "eps": eps, "instances": instances}, metrics)]


def cmd_raz(config: ExperimentConfig, rng):
    N = _count(config, "N", 16, minimum=2)
    K = _count(config, "K", 4096)
    trials = _count(config, "trials", 500)
    kind = config.get("kind", "extreme", str)
    result = raz_success_rate(N, K, trials, rng, kind)
    metrics = {"success_rate": result.rate, "ci_low": result.ci_low, "ci_high": result.ci_high,
               "bits_sent": index_bits(K)}
    return [({"N": N, "K": K, "trials": trials, "kind": kind}, metrics)]


def cmd_raz_calibrate(config: ExperimentConfig, rng):
    Ns = config.get("Ns", [8, 16], int)
    if not Ns or min(Ns) < 2:
        raise ValidationError(f"Ns={Ns} must be non-empty with every N at least 2")
    trials = _count(config, "trials", 250)
    table = calibrate_raz(Ns, rng, trials=trials, k_cap=_count(config, "k_cap", 2**20),
                          kind=config.get("kind", "extreme", str), plant=bool(config.get("plant", False)))
    return [({"N": row["N"], "trials": trials},
             {"K": row["K"], "log2_K": row["log2_K"], "sqrt_N": math.sqrt(row["N"]),
              "success_rate": row["success_rate"], "resolved": row["resolved"]})
            for row in table]


def cmd_ddfs(config: ExperimentConfig, rng):
    inst = _dfs_instance(config, rng)
    shots = _count(config, "shots", 100_000)
    pairs = ddfs_quantum_sample(inst, rng, shots)
    csv_path = config.get("csv")
    if csv_path:
        write_samples_csv(pairs, csv_path)
    reduced = [ddfs_to_dfs_reduction(pair, inst.n)[0] for pair in pairs]
    size = inst.size
    xor_law = OutcomeDistribution.from_samples(reduced, size)
    marginal = OutcomeDistribution.from_samples([s for s, _ in pairs], size)
    uniform = OutcomeDistribution.from_array(np.full(size, 1.0 / size))
    metrics = {
        "l1_error": l1_distance(xor_law, dfs_distribution(inst)),
        "marginal_l1": l1_distance(marginal, uniform),
        "reduction_bits": inst.n,
    }
    return [({"n": inst.n, "shots": shots}, metrics)]


def cmd_sqrt_sampler(config: ExperimentConfig, rng):
    N = _count(config, "N", 64)
    k = _count(config, "k", math.isqrt(N))
    trials = _count(config, "trials", 20_000)
    agree = config.get("agree", N // 2, int)
    if not 0 <= agree <= N:
        raise ValidationError(f"agree={agree} outside [0, {N}]")
    x = SignVector.random(N, rng)
    flips = np.ones(N, dtype=np.int8)
    flips[rng.permutation(N)[: N - agree]] = -1
    y = SignVector(x.entries * flips)
    accepted, bits = 0, 0
    for _ in range(trials):
        accept, run = sqrt_sampler(x, y, k, rng)
        accepted += int(accept)
        bits = run.bits_sent
    a = agree / N
    exact = sqrt_sampler_exact_prob(a, k)
    empirical = accepted / trials
    stderr = math.sqrt(exact * (1 - exact) / trials)
    metrics = {"exact": exact, "empirical": empirical, "stderr": stderr,
               "within_3_sigma": abs(empirical - exact) <= 3 * stderr + 1e-12, "bits_sent": bits}
    if k * k == N:
        approx = cosh_approximation(N, (a - 0.5) * k)
        metrics.update({"cosh_approximation": approx.approximation, "cosh_relative_error": approx.relative_error})
    return [({"N": N, "k": k, "agree": agree, "trials": trials}, metrics)]


def cmd_lemma_verify(config: ExperimentConfig, rng):
    name = config.get("check", "fact1", str)
    if name not in CHECKS:
        raise ValidationError(f"unknown check {name!r}")
    params = {k: v for k, v in config.params.items() if k != "check"}
    verdict = CHECKS[name](params, rng)
    record = verdict.to_record()
    return [({"check": name, **verdict.params},
             {k: record[k] for k in ("lhs", "rhs", "margin", "holds", "samples", "details")})]


def cmd_rectangles(config: ExperimentConfig, rng):
    """Rectangle accounting of random protocols on the N-cube under xi_p"""
    N = _count(config, "N", 4)
    p = config.get("p", 0.0, float)
    depth = _count(config, "depth", 3, minimum=0)
    protocols = _count(config, "protocols", 20)
    points = cube_points(N).astype(np.int64)
    mu = pair_weight(N, p, points @ points.T)
    size = 2**N
    rows = []
    for index in range(protocols):
        protocol = random_protocol(size, size, depth, config.get("trees", 3, int), rng)
        result = acceptance_accounting(protocol, mu)
        direct = direct_acceptance(protocol, mu)
        rows.append(({"N": N, "p": p, "depth": depth, "protocol": index}, {
            "total": result.total,
            "direct": direct,
            "difference": abs(result.total - direct),
            "eta": result.eta,
            "eta_bound_holds": result.eta_bound_holds,
            "rectangles": result.rectangles,
        }))
    return rows


COMMAND_TABLE = {
    "dfs-quantum": cmd_dfs_quantum,
    "dqs-epsnet": cmd_dqs_epsnet,
    "raz": cmd_raz,
    "raz-calibrate": cmd_raz_calibrate,
    "ddfs": cmd_ddfs,
    "sqrt-sampler": cmd_sqrt_sampler,
    "lemma-verify": cmd_lemma_verify,
    "rectangles": cmd_rectangles,
}
