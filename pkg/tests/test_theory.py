import json
import math

import numpy as np
import pytest

from safebai.env import LinearInstance, MonotonicInstance
from safebai import theory
from safebai.theory import (
    a_u_bar,
    alpha_of,
    c_gamma,
    classify_case,
    ell_bar,
    ell_hat_unsafe_bound,
    g_tilde_inverse,
    gap_linear,
    gap_monotonic,
    lower_bound,
    lower_bound_details,
    m_bar,
    monotonic_bounds,
    n_bar,
    phi,
    phi_terms,
    predicted_elimination_epoch,
    psi1,
    psi2,
    psi3,
    sample_complexity_upper_linear,
    theory_report,
    xi,
)

from reference_impls import grid_gap_oracle


class TestGaps:
    def test_linear_bench_gaps(self, linear_bench):
        assert gap_linear(linear_bench, 0) == 0.0
        assert gap_linear(linear_bench, 1) == pytest.approx(0.4, abs=1e-12)
        for i in range(2, 10):
            assert gap_linear(linear_bench, i) == pytest.approx(0.8, abs=1e-12)

    def test_drug_gap(self, drug):
        assert gap_monotonic(drug, 0) == 0.0
        assert gap_monotonic(drug, 1) == pytest.approx(0.497, abs=1e-3)
        assert gap_monotonic(drug, 1) == pytest.approx(0.4976727703868936, abs=1e-12)

    def test_gap_matches_grid_oracle(self, drug):
        oracle = grid_gap_oracle(list(drug.theta), list(drug.mu), drug.gamma)
        for i in range(drug.d):
            assert gap_monotonic(drug, i) == pytest.approx(oracle[i], abs=1e-4)


class TestLowerBound:
    def test_paper_d5_value(self, linear_bench_d5):
        # independent hand evaluation of the bound:
        # (2/3) ln(1/0.24) * (2.36/0.16 + 3 * 2.04/0.64)
        expected = (2.0 / 3.0) * math.log(1 / 0.24) * (2.36 / 0.16 + 3 * 2.04 / 0.64)
        got = lower_bound(linear_bench_d5, 0.1)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(23.1, abs=0.05)

    def test_degenerate_delta(self, linear_bench_d5):
        with pytest.warns(RuntimeWarning):
            assert lower_bound(linear_bench_d5, 1 / 2.4) == 0.0
        value, degenerate, _ = lower_bound_details(linear_bench_d5, 0.5)
        assert degenerate and value == 0.0

    def test_doubling_gaps_quarters_the_formula(self):
        def term(delta_i):
            return (1 + 1.0 + 0.36) / delta_i ** 2

        assert term(0.8) == pytest.approx(term(0.4) / 4.0)

    def test_heuristic_flag_when_saturated(self):
        inst = LinearInstance(theta=[1.0, 0.9], mu=[1.0, 0.5], gamma=1.0,
                              a0=[0.1, 0.1], M=[1.5, 1.5], sigma2=0.5)
        # arm 1: M*mu = 0.75 <= 1 is saturated
        _, _, heuristic = lower_bound_details(inst, 0.1)
        assert heuristic


class TestXi:
    def test_power_of_two(self):
        assert xi(4, 16) == 256.0

    def test_small_x_clamp(self):
        assert xi(4, 1) == xi(4, 2) == 2.0 ** 4

    def test_requires_positive_a(self):
        with pytest.raises(ValueError):
            xi(0, 10)

    def test_growth_bound_grid(self):
        # xi_a(x) <= max(x,2)^z + 2^(a^2/z) and xi_a(x) >= 1 on a broad grid
        for a in (1.0, 2.0, 4.0, math.sqrt(32)):
            for x in np.logspace(0, 6, 25):
                v = xi(a, x)
                assert v >= 1.0
                for z in (0.25, 0.5, 1.0, 2.0, 4.0):
                    assert v <= max(x, 2.0) ** z + 2.0 ** (a * a / z) + 1e-9


class TestPhi:
    def test_hand_evaluated_example(self):
        assert phi_terms(1.0, 0.1, 1.0) == 8.0

    def test_other_terms(self):
        # the four non-constant terms at gamma=1, a0mu=0.1, alpha=1
        assert math.sqrt(8 * math.log2(2.0)) == pytest.approx(2.828, abs=1e-3)
        assert math.sqrt(4 * math.log2(20.0)) == pytest.approx(4.158, abs=1e-3)
        assert 4 * math.log2(math.sqrt(2)) == pytest.approx(2.0)
        lead = math.log2(4.0)
        assert lead + 2 * math.log2(lead) == pytest.approx(4.0)

    def test_nonincreasing_in_alpha(self, linear_bench_d5):
        values = [phi(linear_bench_d5, 2, alpha)
                  for alpha in (0.05, 0.1, 0.5, 1.0, 2.0, 10.0)]
        assert values == sorted(values, reverse=True)

    def test_floor_of_eight(self, linear_bench_d5):
        for alpha in (0.01, 1.0, 100.0):
            assert phi(linear_bench_d5, 0, alpha) >= 8.0

    def test_infinite_for_nonpositive_alpha(self, linear_bench_d5):
        assert math.isinf(phi(linear_bench_d5, 0, 0.0))


class TestCases:
    def test_paper_instance_case1(self, linear_bench_d5):
        # arm 1: M*mu = 2.25 > 1 and optimum M*mu = 1.5 > 1
        info = classify_case(linear_bench_d5, 1)
        assert info.case == 1
        assert info.alpha_i is None and info.alpha_star is None

    def test_boundary_counts_as_saturated(self):
        inst = LinearInstance(theta=[1.0, 0.25], mu=[1.0, 0.5], gamma=1.0,
                              a0=[0.1, 0.1], M=[2.0, 2.0], sigma2=0.5)
        # arm 1: M*mu = 1.0 == gamma exactly; the optimum stays unsaturated
        info = classify_case(inst, 1)
        assert info.case == 2
        assert info.alpha_i == 0.0

    def test_alpha_zero_iff_boundary(self):
        inst = LinearInstance(theta=[1.0, 0.25], mu=[1.0, 0.5], gamma=1.0,
                              a0=[0.1, 0.1], M=[2.0, 2.0], sigma2=0.5)
        assert alpha_of(inst, 1) == 0.0
        assert alpha_of(inst, 0) < 0.0

    def test_rejects_optimum(self, linear_bench_d5):
        with pytest.raises(ValueError):
            classify_case(linear_bench_d5, 0)

    def test_all_four_cases_reachable(self):
        both_unsat = LinearInstance(theta=[1.0, 0.9], mu=[1.0, 1.5], gamma=1.0,
                                    a0=[0.1, 0.1], M=[1.5, 1.5], sigma2=0.5)
        assert classify_case(both_unsat, 1).case == 1
        i_sat = LinearInstance(theta=[1.0, 0.3], mu=[1.0, 0.5], gamma=1.0,
                               a0=[0.1, 0.1], M=[1.5, 1.5], sigma2=0.5)
        assert classify_case(i_sat, 1).case == 2
        star_sat = LinearInstance(theta=[1.0, 0.2], mu=[0.5, 1.5], gamma=1.0,
                                  a0=[0.1, 0.1], M=[1.5, 1.5], sigma2=0.5)
        assert classify_case(star_sat, 1).case == 3
        both_sat = LinearInstance(theta=[1.0, 0.3], mu=[0.5, 0.6], gamma=1.0,
                                  a0=[0.1, 0.1], M=[1.5, 1.5], sigma2=0.5)
        assert classify_case(both_sat, 1).case == 4


class TestPredictedEpochs:
    def test_psi_values(self, linear_bench_d5):
        # arm 5 of the d=5 instance: log2(4 * 3.2 / 0.8) = 4
        assert psi1(linear_bench_d5, 4, 0.8) == pytest.approx(4.0, abs=1e-12)
        assert psi3(4.0) == 0.0
        assert math.isinf(psi1(linear_bench_d5, 4, 0.0))
        assert math.isinf(psi2(1.0, 1.5, 1.0, -0.1))

    def test_paper_arm5_epoch(self, linear_bench_d5):
        # psi1 = 4 is dominated by the two phi(1) = 8 terms
        assert predicted_elimination_epoch(linear_bench_d5, 4) == 8

    def test_all_paper_arms(self, linear_bench_d5):
        for i in range(1, 5):
            assert predicted_elimination_epoch(linear_bench_d5, i) == 8

    def test_psi_decreasing_in_gap(self, linear_bench_d5):
        xs = (0.1, 0.2, 0.4, 0.8, 1.6)
        p1 = [psi1(linear_bench_d5, 4, x) for x in xs]
        p2 = [psi2(1.0, 1.5, 1.0, x) for x in xs]
        p3 = [psi3(x) for x in xs]
        for seq in (p1, p2, p3):
            assert seq == sorted(seq, reverse=True)


class TestSampleComplexityUpper:
    def test_zero_epochs_give_zero(self, linear_bench_d5):
        zeros = {i: 0 for i in range(5)}
        assert sample_complexity_upper_linear(linear_bench_d5, 0.1, zeros) == 0.0

    def test_doubling_sigma2_doubles_first_summand(self, linear_bench_d5):
        epochs = {i: 3 for i in range(1, 5)}
        u1 = sample_complexity_upper_linear(linear_bench_d5, 0.1, epochs)
        doubled = LinearInstance(theta=linear_bench_d5.theta,
                                 mu=linear_bench_d5.mu,
                                 gamma=linear_bench_d5.gamma,
                                 a0=linear_bench_d5.a0, M=linear_bench_d5.M,
                                 sigma2=2 * linear_bench_d5.sigma2)
        u2 = sample_complexity_upper_linear(doubled, 0.1, epochs)
        linear_part = 2 * sum(epochs.values())
        assert u2 - linear_part == pytest.approx(2 * (u1 - linear_part), rel=1e-12)

    def test_dominates_lower_bound_on_corpus(self, linear_bench, linear_bench_d5):
        extra = LinearInstance(theta=[1.0, 0.3], mu=[0.5, 0.6], gamma=1.0,
                               a0=[0.1, 0.1], M=[1.5, 1.5], sigma2=0.5)
        for inst in (linear_bench, linear_bench_d5, extra):
            upper = sample_complexity_upper_linear(inst, 0.1)
            assert upper >= lower_bound_details(inst, 0.1)[0]


class TestMonotonicBounds:
    def test_ell_hat_unsafe(self):
        assert ell_hat_unsafe_bound(0.1) == 7  # ceil(log2(80))
        assert ell_hat_unsafe_bound(1.0) == 3

    def test_a_u_bar_first_epoch(self, drug):
        # independent expression: g^-1(0.4)/2 + (1 + 40 g^-1(0.4))/2
        ginv04 = math.log(0.4 / 0.6)
        expected = ginv04 / 2 + (1 + 4 * ginv04 / 0.1) / 2
        assert a_u_bar(drug, 1, 1) == pytest.approx(expected, rel=1e-12)
        assert a_u_bar(drug, 1, 1) == pytest.approx(-7.81, abs=5e-3)

    def test_n_bar_clamps_below_range(self, drug):
        # gamma - 1/2 = -0.2 is below the logistic range so the extended
        # inverse returns a0 and the first-epoch count vanishes
        assert n_bar(drug, 0, 1) == 0.0

    def test_n_bar_later_epoch(self, drug):
        # epoch 2: (g^-1(0.05) - a0) / 0.25
        expected = (math.log(0.05 / 0.95) + 3.0) / 0.25
        assert n_bar(drug, 0, 2) == pytest.approx(expected, rel=1e-12)

    def test_m_bar_uses_relaxed_threshold(self, drug):
        expected = (math.log(0.15 / 0.85) + 3.0) / 0.25
        assert m_bar(drug, 0, 2) == pytest.approx(expected, rel=1e-12)

    def test_g_tilde_inverse_piecewise(self, drug):
        assert g_tilde_inverse(drug, 0, -0.2) == -3.0
        assert g_tilde_inverse(drug, 0, 0.9) == pytest.approx(math.log(0.4 / 0.6))
        assert g_tilde_inverse(drug, 0, 0.2) == pytest.approx(math.log(0.2 / 0.8))

    def test_ell_bar(self, drug):
        assert ell_bar(drug, 1) == 4
        assert ell_bar(drug, 2) == 4
        with pytest.raises(ValueError):
            ell_bar(drug, 0)

    def test_a_u_bar_dominates_boundary_after_crossing(self, drug):
        boundary = math.log(0.3 / 0.7)
        lo = ell_hat_unsafe_bound(drug.eps_safe)
        for ell in range(lo, 41):
            assert a_u_bar(drug, 1, ell) >= boundary

    def test_bundle(self, drug):
        bounds = monotonic_bounds(drug, 0.1)
        assert bounds.ell_bars == [4, 4, 4]
        assert bounds.ell_hat_unsafe == 7
        assert math.isfinite(bounds.predicted_samples)
        assert bounds.predicted_samples > 0
        assert bounds.t_bar >= 1

    def test_unbounded_flag(self):
        # a near-zero gap pushes the feasible epoch past a small scan cap
        # (the smaller slope has the larger safe reward, so arm 0 is optimal)
        inst = MonotonicInstance(theta=[9.9999999, 10.0], mu=[1.0, 1.0],
                                 gamma=0.3, eps_safe=0.1, a0=[-3.0, -3.0],
                                 sigma2=0.1)
        assert ell_bar(inst, 1, cap=10) is None
        bounds = monotonic_bounds(inst, 0.1, cap=10)
        assert math.isinf(bounds.predicted_samples)


class TestReport:
    def test_linear_report(self, linear_bench_d5):
        rep = theory_report(linear_bench_d5, 0.1)
        assert rep.model == "linear"
        assert rep.i_star == 0
        assert rep.gaps[1] == pytest.approx(0.4, abs=1e-12)
        assert rep.cases == [None, 1, 1, 1, 1]
        assert rep.lower_bound == pytest.approx(23.13, abs=0.01)
        assert rep.predicted_epochs == [None, 8, 8, 8, 8]
        assert rep.predicted_samples >= rep.lower_bound
        assert rep.constants["C_gamma"] == pytest.approx(c_gamma(1.0))
        json.dumps(rep.to_dict())  # serializable

    def test_monotonic_report(self, drug):
        rep = theory_report(drug, 0.1)
        assert rep.model == "logistic"
        assert min(g for g in rep.gaps if g > 0) == pytest.approx(0.4977, abs=1e-3)
        assert rep.lower_bound is None
        assert rep.predicted_epochs == [4, 4, 4]
        assert rep.constants["ell_hat_unsafe_bound"] == 7
        json.dumps(rep.to_dict())
