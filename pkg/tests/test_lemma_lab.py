import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core_math.errors import CapacityError, DomainError, ValidationError
from lemma_lab import calculus, gaussian, projections, skew, xi
from lemma_lab.verdicts import CHECKS, run_check
from protocol_framework.rectangles import Rectangle, rect_measure_exact


class TestXi:
    def test_extreme_correlations(self, rng):
        x, y = xi.xi_sample_batch(10, 1.0, 50, rng)
        assert (x == y).all()
        x, y = xi.xi_sample_batch(10, -1.0, 50, rng)
        assert (x == -y).all()

    def test_invalid_correlation(self, rng):
        with pytest.raises(DomainError):
            xi.xi_sample(xi.XiParams(4, 1.5), rng)

    def test_per_coordinate_agreement(self, rng):
        samples = 200_000
        x, y = xi.xi_sample_batch(6, 0.4, samples, rng)
        agreement = (x == y).mean(axis=0)
        sigma = math.sqrt(0.7 * 0.3 / samples)
        assert np.all(np.abs(agreement - 0.7) <= 4 * sigma)

    @pytest.mark.parametrize("N, p, delta, expected", [
        (2, 0.0, 0, 0.5),
        (2, 1.0, 2, 1.0),
        (4, 0.5, 2, 27 / 64),
        (4, 0.5, 1, 0.0),
        (4, 0.5, 6, 0.0),
    ])
    def test_overlap_pmf_values(self, N, p, delta, expected):
        assert xi.xi_overlap_pmf(N, p, delta) == pytest.approx(expected, abs=1e-15)

    @given(st.integers(min_value=1, max_value=64), st.floats(min_value=-1.0, max_value=1.0))
    @settings(max_examples=50)
    def test_overlap_pmf_normalized_and_second_moment(self, N, p):
        assert xi.overlap_pmf_vector(N, p).sum() == pytest.approx(1.0, abs=1e-10)
        assert xi.expected_squared_overlap_enumerated(N, p) == pytest.approx(
            xi.expected_squared_overlap(N, p), abs=1e-12)

    def test_second_moment_spot_value(self):
        assert xi.expected_squared_overlap(4, 0.5) == pytest.approx(7 / 16)
        assert xi.expected_squared_overlap_enumerated(4, 0.5) == pytest.approx(7 / 16, abs=1e-12)

    def test_padded_law_matches_unpadded_law(self):
        for N, p in [(4, 0.3), (16, 0.5), (40, -0.2)]:
            np.testing.assert_allclose(xi.xi_prime_overlap_pmf(N, p), xi.embed_overlap_pmf(N, p), atol=1e-12)
        for N in (5, 6):
            with pytest.raises(ValidationError):
                xi.orthogonal_pad(N)

    @pytest.mark.parametrize("N", [4, 8, 20])
    def test_orthogonal_pad_is_balanced(self, N):
        x_pad, y_pad = xi.orthogonal_pad(N)
        assert int(x_pad.sum()) == 0
        assert int(y_pad.sum()) == 0
        assert int(np.count_nonzero(x_pad == y_pad)) == N // 2

    @pytest.mark.parametrize("p", [0.0, 0.3])
    def test_padded_coordinates_are_uniform(self, p, rng):
        samples = 100_000
        xs, ys = xi.xi_prime_sample_batch(8, p, samples, rng)
        sigma = math.sqrt(0.25 / samples)
        assert np.all(np.abs((xs == 1).mean(axis=0) - 0.5) <= 4 * sigma)
        assert np.all(np.abs((ys == 1).mean(axis=0) - 0.5) <= 4 * sigma)

    def test_single_padded_pair(self, rng):
        x, y = xi.xi_prime_sample(8, 1.0, rng)
        assert x.shape == y.shape == (16,)
        assert set(np.unique(x)) <= {-1, 1}
        assert int(x.astype(int) @ y.astype(int)) == 8

    def test_single_pair(self, rng):
        x, y = xi.xi_sample(xi.XiParams(6, 1.0), rng)
        assert x.shape == (6,)
        assert (x == y).all()
        x, y = xi.xi_sample(xi.XiParams(6, -1.0), rng)
        assert (x == -y).all()

    @pytest.mark.parametrize("p", [0.0, 0.5])
    def test_sampled_overlap_law(self, p, rng):
        N, samples = 4, 1_000_000
        x, y = xi.xi_sample_batch(N, p, samples, rng)
        overlaps = np.sum(x.astype(int) * y.astype(int), axis=1)
        empirical = np.bincount(overlaps + N, minlength=2 * N + 1) / samples
        assert np.abs(empirical - xi.overlap_pmf_vector(N, p)).sum() <= 0.01

    def test_padded_samples_keep_the_overlap(self, rng):
        x_pad, y_pad = xi.orthogonal_pad(8)
        assert int(x_pad.astype(int) @ y_pad.astype(int)) == 0
        xs, ys = xi.xi_prime_sample_batch(8, 0.3, 500, rng)
        assert xs.shape == (500, 16)
        overlaps = np.sum(xs.astype(int) * ys.astype(int), axis=1)
        assert np.all(np.abs(overlaps) <= 8)
        assert np.all(overlaps % 2 == 0)

    def test_shift_reaches_target_correlation(self, rng):
        p, q = -0.2, 0.3
        x, y = xi.xi_sample_batch(8, p, 100_000, rng)
        xs, ys = xi.shift_pairs(x, y, q, rng)
        expected = (1 + xi.shift_correlation(p, q)) / 2
        sigma = math.sqrt(expected * (1 - expected) / xs.size)
        assert abs((xs == ys).mean() - expected) <= 4 * sigma
        with pytest.raises(DomainError):
            xi.shift_pairs(x, y, 1.5, rng)

    @given(st.floats(min_value=-1, max_value=1), st.floats(min_value=0, max_value=1),
           st.floats(min_value=0, max_value=1))
    def test_shift_composes(self, p, q1, q2):
        twice = xi.shift_correlation(xi.shift_correlation(p, q1), q2)
        once = xi.shift_correlation(p, xi.shift_correlation(q1, q2))
        assert twice == pytest.approx(once, abs=1e-12)

    def test_shifted_targets(self):
        out = xi.shifted_targets(100, 10)
        p = math.sqrt(0.1)
        assert out["p"] == pytest.approx(p)
        starts = [t["shifted"] for t in out["targets"]]
        assert starts[0] == pytest.approx(0.0, abs=1e-15)
        assert starts[1] == pytest.approx(p / (1 + p))
        assert starts[2] == pytest.approx(2 * p / (1 + p))
        for target in out["targets"]:
            assert target["expected_acceptance"] == pytest.approx(target["closed_form"], rel=1e-9)
        assert out["targets"][0]["in_units_of_1_over_4N"] == pytest.approx(1.0)

    def test_techbound_ratio(self):
        assert xi.techbound_ratio(10, 0.01, 3).ratio == 0.0
        with pytest.raises(ValidationError):
            xi.techbound_ratio(5, 0.01, 1)
        sweep = xi.techbound_sweep(100, 0.01)
        assert sweep.in_hypothesis
        assert 1.0 < sweep.max_ratio < 2.0
        assert xi.techbound_ratio(100, 0.01, sweep.argmax_delta).ratio == pytest.approx(sweep.max_ratio)
        assert not xi.techbound_sweep(100, 0.2).in_hypothesis

    def test_constant_stability(self):
        assert xi.constant_stability([2.0, 2.0, 2.0]) == 0.0
        assert xi.constant_stability([1.0, 3.0]) == pytest.approx(0.5)

    def test_contradiction_margin(self):
        result = xi.contradiction_margin(10, 2)
        assert result.lower == pytest.approx(11 / 4)
        assert result.upper == pytest.approx(3 / 16 * (math.exp(2) + 41 * math.exp(-2)))
        assert result.holds
        assert not xi.contradiction_margin(1, 0).holds


class TestSkew:
    def test_config_validation(self):
        with pytest.raises(DomainError):
            skew.SkewCheckConfig(N=8, b=0)
        with pytest.raises(DomainError):
            skew.SkewCheckConfig(N=8, b=2, delta=0)
        with pytest.raises(DomainError):
            skew.SkewCheckConfig(N=8, b=9)
        with pytest.raises(ValidationError):
            skew.SkewCheckConfig(N=14, b=2)
        assert skew.SkewCheckConfig(N=12, b=3).p == pytest.approx(0.5)

    @pytest.mark.parametrize("s", [-3.0, 0.0, 2.0])
    def test_full_rectangle(self, s):
        result = skew.skewed_anticoncentration_check(skew.SkewCheckConfig(8, 4, s), Rectangle.full(8))
        assert not result.skipped
        assert result.lhs == pytest.approx(math.cosh(s))
        assert result.holds

    def test_small_rectangle_is_skipped(self):
        alice = np.zeros(256, bool)
        alice[3] = True
        rect = Rectangle.from_masks(alice, alice, N=8)
        result = skew.skewed_anticoncentration_check(skew.SkewCheckConfig(8, 4), rect)
        assert result.skipped
        assert result.to_record()["skipped"]

    def test_generators(self, rng):
        assert skew.hamming_ball(6, 0, 0, 6).size == 64 * 64
        assert skew.hamming_ball(6, 0, 0, 0).size == 1
        rect = skew.threshold(6, 0, 0)
        assert rect.alice_mask.sum() == sum(math.comb(6, k) for k in range(4))
        assert not skew.threshold(14, 0, 0).is_explicit
        leaves = skew.protocol_leaf(6, 3, rng)
        assert all(leaf.N == 6 for leaf in leaves)
        assert skew.random_density(6, 1.0, rng).size == 64 * 64

    def test_sweep_has_no_violations(self, rng):
        family = skew.adversarial_family(8, rng, random_count=30)
        summary = skew.skew_sweep(8, 4, [-3.0, -1.0, 0.0, 1.0, 3.0], family)
        assert summary["violations"] == 0
        assert summary["checked"] > 0

    def test_monte_carlo_mode_on_predicate_rectangle(self, rng):
        cfg = skew.SkewCheckConfig(14, 4, 1.0, mode="mc", samples=20_000)
        result = skew.skewed_anticoncentration_check(cfg, skew.threshold(14, -4, -4), rng)
        assert not result.skipped
        assert result.tolerance > 0
        assert result.holds

    def test_verdict_sweeps_requested_rectangle_count(self):
        verdict = run_check("skew", {"N": 8, "b": 4, "rectangles": 50}, 0)
        assert verdict.holds
        assert verdict.params["rectangles"] == 50
        assert verdict.details["checked"] + verdict.details["skipped"] >= 51 * 5

    @pytest.mark.slow
    def test_default_sweep_at_twelve(self):
        verdict = run_check("skew", {}, 0)
        assert verdict.params["rectangles"] == skew.DEFAULT_RANDOM_RECTANGLES == 1000
        assert verdict.holds


class TestGaussian:
    def test_sign_map_values(self):
        assert gaussian.sign_map(0.0) == pytest.approx(0.0)
        assert gaussian.sign_map(1.0) == 1.0
        assert gaussian.sign_map(-1.0) == pytest.approx(-1.0)
        with pytest.raises(DomainError):
            gaussian.sign_map(1.2)

    @pytest.mark.parametrize("eta, p", [(0.5, 1 / 3), (-0.5, -1 / 3), (1 / math.sqrt(2), 0.5), (-1 / math.sqrt(2), -0.5)])
    def test_sign_map_identities(self, eta, p):
        assert gaussian.sign_map(eta) == pytest.approx(p, abs=1e-15)

    def test_single_gaussian_pair(self, rng):
        x, y = gaussian.gaussian_xi_sample(gaussian.GaussianXiParams(5, 1.0), rng)
        assert x.shape == y.shape == (5,)
        np.testing.assert_allclose(y, x)
        x, y = gaussian.gaussian_xi_sample(gaussian.GaussianXiParams(5, -1.0), rng)
        np.testing.assert_allclose(y, -x)
        with pytest.raises(DomainError):
            gaussian.GaussianXiParams(5, 1.5)

    def test_gaussian_pairs_have_correlation_eta(self, rng):
        x, y = gaussian.gaussian_xi_sample_batch(4, 0.6, 50_000, rng)
        assert np.corrcoef(x.ravel(), y.ravel())[0, 1] == pytest.approx(0.6, abs=0.01)

    def test_signs_send_zero_to_plus(self):
        assert gaussian.signs([-0.5, 0.0, 2.0]).tolist() == [-1, 1, 1]

    def test_sign_map_check(self, rng):
        result = gaussian.sign_map_check(0.3, 6, 100_000, rng)
        assert abs(result.empirical_agreement - result.expected_agreement) <= 4 * result.stderr
        exact_only = gaussian.sign_map_check(0.3)
        assert exact_only.samples == 0

    def test_gaussian_rectangle_against_discrete(self, rng):
        alice = rng.random(16) < 0.5
        bob = rng.random(16) < 0.5
        measure = gaussian.gaussian_rectangle_measure(alice, bob, 0.4, 200_000, rng)
        exact = gaussian.sign_rectangle_exact(alice, bob, 0.4)
        assert abs(measure.value - exact) <= 4 * measure.stderr + 1e-9
        assert exact == pytest.approx(rect_measure_exact(Rectangle.from_masks(alice, bob), gaussian.sign_map(0.4)))


class TestCalculus:
    def test_f_at_zero_is_boundary(self):
        check = calculus.f_function_checks(0.0)
        assert check.F == pytest.approx(0.0, abs=1e-15)
        assert check.F_second == pytest.approx(-2.0)
        assert check.boundary
        assert check.derivative_matches

    @pytest.mark.parametrize("x", [0.01, 0.1, 0.25, 0.4, 0.49, 0.499])
    def test_f_bounds_and_derivative(self, x):
        check = calculus.f_function_checks(x)
        assert check.bound_holds
        assert check.derivative_matches
        assert not check.boundary

    def test_f_domain(self):
        with pytest.raises(DomainError):
            calculus.f_function_checks(0.5)
        with pytest.raises(DomainError):
            calculus.f_function_checks(-0.1)

    def test_f_grid(self):
        summary = calculus.f_function_grid(step=1e-3)
        assert summary["points"] == 499
        assert summary["bound_failures"] == 0
        assert summary["derivative_failures"] == 0

    def test_numeric_second_derivative_on_arrays(self):
        grid = np.array([0.0, 0.1, 0.3, 0.49])
        batch = calculus.f_second_numeric(grid)
        scalars = [calculus.f_second_numeric(float(x)) for x in grid]
        np.testing.assert_allclose(batch, scalars, rtol=calculus.FD_TOL, atol=calculus.FD_TOL)
        np.testing.assert_allclose(batch, calculus.f_second_closed(grid), rtol=calculus.FD_TOL, atol=calculus.FD_TOL)

    def test_rademacher_quantities(self):
        assert calculus.appendixB_min_abs_error_exact(1) == 0
        assert calculus.appendixB_min_abs_error_exact(2) == 2
        assert calculus.appendixB_min_abs_error_exact(0) == Fraction(0)
        assert calculus.expected_abs_rademacher_sum(2) == 1.0
        assert calculus.expected_abs_rademacher_sum(3) == 1.5
        with pytest.raises(CapacityError):
            calculus.appendixB_min_abs_error(300)

    def test_min_abs_error_scales_linearly(self):
        scaled = [calculus.appendixB_min_abs_error(m) / m for m in (8, 16, 32, 64)]
        assert max(scaled) / min(scaled) <= 2.0

    def test_query_bound(self):
        assert calculus.deterministic_query_bound(64, 2) > 0
        with pytest.raises(DomainError):
            calculus.deterministic_query_bound(8, 9)


class TestProjections:
    def test_tail_bound_branches(self):
        assert projections.projection_tail_bound(3, 1.0) == pytest.approx(math.exp(-1))
        assert projections.projection_tail_bound(3, 2.0) == pytest.approx(math.exp(-2))
        assert projections.projection_tail_bound(6, 0.5) == pytest.approx(math.exp(-0.5))

    @pytest.mark.parametrize("N, r, delta", [(16, 4, 0.5), (16, 4, 1.0), (32, 8, 2.0)])
    def test_randomproj_tail(self, N, r, delta, rng):
        result = projections.randomproj_tail_check(N, r, delta, 20_000, rng)
        assert result.holds
        with pytest.raises(DomainError):
            projections.randomproj_tail_check(N, 0, delta, 10, rng)

    def test_randomproj_trivial_cases(self, rng):
        assert projections.randomproj_tail_check(8, 8, 0.5, 1000, rng).empirical_tail == 0.0
        result = projections.randomproj_tail_check(8, 2, 0.0, 1000, rng)
        assert result.bound == 1.0
        assert result.holds

    @pytest.mark.parametrize("N", [2, 4, 8, 16])
    def test_overlap_law(self, N, rng):
        result = projections.overlap_law_check(N, 100_000, rng)
        assert [t["threshold"] for t in result.tails] == [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
        assert result.ks_statistic < projections.KS_LIMIT
        # 4-sigma equivalent per threshold
        assert all(tail["pvalue"] >= 6.3e-5 for tail in result.tails)

    def test_overlap_cdf_endpoints(self):
        cdf = projections.overlap_cdf(8)
        assert cdf(0.0) == 0.0
        assert cdf(1.0) == 1.0


class TestVerdicts:
    def test_fact1_spot_value(self):
        verdict = run_check("fact1", {"N": 4, "p": 0.5}, 0)
        assert verdict.lhs == pytest.approx(7 / 16)
        assert verdict.holds
        assert verdict.seed == 0

    def test_unknown_check(self):
        with pytest.raises(ValidationError):
            run_check("nope", {}, 0)

    @pytest.mark.parametrize("name", ["xi-overlap", "fact2-overlap", "shift-semigroup", "contradiction",
                                      "query-bound", "appendixB", "accounting"])
    def test_cheap_checks_hold(self, name):
        assert run_check(name, {}, 1).holds

    def test_list_parameters_from_strings(self):
        verdict = run_check("appendixB", {"m": "8,16"}, 0)
        assert verdict.params["m"] == [8, 16]

    def test_techbound_small_grid(self):
        verdict = run_check("techbound", {"Ns": "100,400"}, 0)
        assert verdict.holds
        assert verdict.details["in_hypothesis"]

    def test_records_are_plain(self):
        record = run_check("contradiction", {"b": 10, "s": 2}, 0).to_record()
        assert record["holds"] is True
        assert set(record) >= {"check", "params", "lhs", "rhs", "margin", "seed"}

    def test_every_check_is_registered(self):
        assert len(CHECKS) == 16
