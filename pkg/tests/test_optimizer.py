"""Closed-form optimization: branch logic, quartic solving, grid agreement."""

import math

import numpy as np
import pytest

from mzqfi.errors import AllCoeffsZero
from mzqfi.fisher_core import BundleKind, QfiSelector, coeff_bundle, qfi_curve
from mzqfi.optimizer import (
    BALANCED_T,
    QuarticCoeffs,
    grid_verify,
    optimize,
    optimize_2p,
    optimize_i,
    optimize_ii,
    solve_quartic,
)
from mzqfi.sampling import random_spec
from mzqfi.shorthand import ShorthandCoeffs, shorthand_for
from mzqfi.state_catalog import (
    InputStateSpec,
    coherent,
    fock,
    squeezed_coherent,
    squeezed_vacuum,
    tmsv,
    vacuum,
)


def pmc_pair(alpha, beta, r, z, condition):
    """Squeezed-coherent pair under one of the three matching conditions."""
    squeeze1 = {1: math.pi, 2: 0.0, 3: math.pi}[condition]
    beta_phase = -math.pi / 2 if condition == 3 else 0.0
    return InputStateSpec.separable(
        squeezed_coherent(beta, beta_phase, r, 0.0),
        squeezed_coherent(alpha, 0.0, z, squeeze1),
    )


class TestSolveQuartic:
    def test_biquadratic_with_double_root(self):
        roots = solve_quartic(QuarticCoeffs(1, 0, -1, 0, 0))
        assert len(roots) == 3
        for found, expected in zip(roots, (-1.0, 0.0, 1.0)):
            assert abs(found - expected) < 1e-10

    def test_quadratic_fallback(self):
        roots = solve_quartic(QuarticCoeffs(0, 0, 1, 0, -1 / 16))
        assert roots == pytest.approx([-0.25, 0.25], abs=1e-12)

    def test_linear_fallback(self):
        assert solve_quartic(QuarticCoeffs(0, 0, 0, 2, -1)) == pytest.approx([0.5])

    def test_no_real_roots_in_range(self):
        assert solve_quartic(QuarticCoeffs(0, 0, 1, 0, 1)) == []

    def test_all_zero_raises(self):
        with pytest.raises(AllCoeffsZero):
            solve_quartic(QuarticCoeffs(0, 0, 0, 0, 0))

    def test_residuals_meet_contract(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            coeffs = QuarticCoeffs(*rng.normal(size=5))
            scale = max(abs(c) for c in coeffs.as_array())
            for root in solve_quartic(coeffs):
                assert abs(np.polyval(coeffs.as_array(), root)) <= 1e-9 * scale

    def test_roots_match_derivative_sign_changes(self):
        # The stationarity quartic of the matched squeezed-coherent pair must
        # reproduce every sign change of the numerically sampled derivative of
        # the asymmetric QFI with respect to |TR| on both branches.
        sh = shorthand_for(pmc_pair(3.0, 2.0, 0.9, 0.5, condition=3))
        _, c1, c2, c3, c4 = coeff_bundle(sh, BundleKind.ASYM).coeffs
        quartic = QuarticCoeffs(
            16 * (c1 * c1 + 4 * c2 * c2),
            16 * (4 * c2 * c3 + c1 * c4),
            4 * (4 * c3 * c3 - 4 * c2 * c2 - c1 * c1 + c4 * c4),
            -4 * (2 * c2 * c3 + c1 * c4),
            c2 * c2 - c4 * c4,
        )
        roots = solve_quartic(quartic)
        chi = np.linspace(1e-9, 0.5 - 1e-9, 1_000_000)
        for branch in (+1.0, -1.0):
            t = np.sqrt(0.5 * (1.0 + branch * np.sqrt(1.0 - 4.0 * chi * chi)))
            values = qfi_curve(sh, t, QfiSelector.ASYM)
            slope_sign = np.sign(np.diff(values))
            flips = np.nonzero(slope_sign[1:] * slope_sign[:-1] < 0)[0]
            for idx in flips:
                location = chi[idx + 1]
                assert any(abs(location - r) < 1e-5 for r in roots), (branch, location)


class TestTwoParameter:
    def test_balanced_case_coherent_fock(self):
        sh = shorthand_for(InputStateSpec.separable(fock(1), coherent(1000.0, 0.0)))
        report = optimize_2p(sh)
        assert report.case_label == "TwoParam.C1PosC2Zero"
        assert report.t_opt == BALANCED_T
        assert report.f_max == 3_000_001.0

    def test_degenerate_c1_negative(self):
        sh = ShorthandCoeffs(
            v_plus=2.0, v_minus=0.0, v_cov=0.0, a_coeff=1.0, s_plus=0.0, s_minus=0.0, p_coeff=0.0
        )
        report = optimize_2p(sh)
        assert report.case_label == "TwoParam.C1NegC2Zero"
        assert report.t_opt in (0.0, 1.0)
        assert math.isclose(report.f_max, coeff_bundle(sh, BundleKind.TWO_PARAM).coeffs[0])

    def test_tmsv_balanced_maximum(self):
        sh = shorthand_for(tmsv(2.0))
        report = optimize_2p(sh)
        expected = 4.0 * math.sinh(2.0) ** 2 * math.cosh(2.0) ** 2
        assert report.t_opt == BALANCED_T
        assert math.isclose(report.f_max, expected, rel_tol=1e-12)

    def test_number_eigenstate_goes_through_limit_path(self):
        sh = shorthand_for(InputStateSpec.separable(fock(2), fock(2)))
        report = optimize_2p(sh)
        assert report.case_label.startswith("TwoParam.FssZero")
        assert report.f_max == pytest.approx(12.0, rel=1e-13)

    def test_phase_conjugation_mirrors_general_optimum(self):
        spec = pmc_pair(3.0, 2.0, 0.9, 0.5, condition=3)
        sh = shorthand_for(spec)
        conjugated = ShorthandCoeffs(
            v_plus=sh.v_plus,
            v_minus=sh.v_minus,
            v_cov=sh.v_cov,
            a_coeff=sh.a_coeff,
            s_plus=-sh.s_plus,
            s_minus=-sh.s_minus,
            p_coeff=-sh.p_coeff,
        )
        first, second = optimize_2p(sh), optimize_2p(conjugated)
        assert first.case_label == "TwoParam.General" == second.case_label
        assert math.isclose(second.t_opt, math.sqrt(1.0 - first.t_opt**2), abs_tol=1e-12)
        assert math.isclose(first.f_max, second.f_max, rel_tol=1e-12)


class TestSymmetric:
    def test_poissonian_port_is_irrelevant(self):
        sh = shorthand_for(InputStateSpec.separable(vacuum(), coherent(1.5, 0.2)))
        report = optimize_ii(sh)
        assert report.case_label == "Sym.Irrelevant"
        assert report.t_opt is None
        assert math.isclose(report.f_max, 1.5**2, rel_tol=1e-13)

    def test_sub_poissonian_port_prefers_balanced(self):
        port1 = squeezed_coherent(10.0, 0.0, 0.6, 0.0)  # variance below the mean
        report = optimize_ii(shorthand_for(InputStateSpec.separable(vacuum(), port1)))
        assert report.case_label == "Sym.C1PosC2Zero"
        assert report.t_opt == BALANCED_T

    def test_super_poissonian_port_degenerates(self):
        port1 = squeezed_coherent(10.0, 0.0, 0.6, -0.5 * math.pi)  # variance above the mean
        report = optimize_ii(shorthand_for(InputStateSpec.separable(vacuum(), port1)))
        assert report.case_label == "Sym.C1NegC2Zero"
        assert report.t_opt in (0.0, 1.0)


class TestAsymmetric:
    def test_interior_optimum_matches_quoted_values(self):
        for squeeze_phase, expected_tsq, tol in ((0.0, 0.72, 0.005), (-0.15 * math.pi, 0.95, 0.005)):
            spec = InputStateSpec.separable(
                vacuum(), squeezed_coherent(10.0, 0.0, 0.6, squeeze_phase)
            )
            report = optimize_i(shorthand_for(spec))
            assert report.case_label == "Asym.Interior"
            assert abs(report.t_opt - math.sqrt(expected_tsq)) < tol

    def test_coherent_fock_interior_formula(self):
        sh = shorthand_for(InputStateSpec.separable(fock(1), coherent(1000.0, 0.0)))
        report = optimize_i(sh)
        assert report.case_label == "Asym.Interior"
        assert abs(report.t_opt**2 - (0.5 + 0.25)) < 1e-3

    def test_single_coherent_prefers_full_transmission(self):
        sh = shorthand_for(InputStateSpec.separable(vacuum(), coherent(1.7, 0.3)))
        report = optimize_i(sh)
        assert report.t_opt == 1.0
        assert math.isclose(report.f_max, 4.0 * 1.7**2, rel_tol=1e-13)

    def test_tmsv_balanced(self):
        report = optimize_i(shorthand_for(tmsv(1.2)))
        assert report.case_label == "Asym.C1PosC3Zero"
        assert report.t_opt == BALANCED_T

    def test_quartic_branch_agrees_with_grid(self):
        sh = shorthand_for(pmc_pair(3.0, 2.0, 0.9, 0.5, condition=3))
        report = optimize_i(sh)
        assert report.case_label == "Asym.GeneralQuartic"
        grid_t, grid_f = grid_verify(sh, QfiSelector.ASYM, 100_000)
        assert abs(report.f_max - grid_f) <= 1e-8 * max(1.0, report.f_max)
        assert abs(report.t_opt - grid_t) <= 1e-3

    def test_double_coherent_mixed_branch(self):
        spec = InputStateSpec.separable(coherent(1.0, 0.0), coherent(1.3, 1.1))
        report = optimize_i(shorthand_for(spec))
        assert report.case_label == "Asym.MixedInterior"
        grid_t, grid_f = grid_verify(shorthand_for(spec), QfiSelector.ASYM, 100_000)
        assert abs(report.f_max - grid_f) <= 1e-8 * max(1.0, report.f_max)

    def test_upper_arm_selector_mirrors_lower_arm(self):
        spec = InputStateSpec.separable(coherent(1.0, 0.0), coherent(1.3, 1.1))
        sh = shorthand_for(spec)
        report = optimize(sh, QfiSelector.ASYM_UPPER)
        assert report.case_label.startswith("AsymUpper.")
        grid_t, grid_f = grid_verify(sh, QfiSelector.ASYM_UPPER, 100_000)
        assert abs(report.f_max - grid_f) <= 1e-8 * max(1.0, report.f_max)


class TestGridVerify:
    def test_requires_dense_grid(self):
        sh = shorthand_for(tmsv(1.0))
        with pytest.raises(ValueError):
            grid_verify(sh, QfiSelector.TWO_PARAM, 999)

    def test_tmsv_balanced_two_parameter(self):
        t_best, _ = grid_verify(shorthand_for(tmsv(1.0)), QfiSelector.TWO_PARAM, 100_000)
        assert abs(t_best - BALANCED_T) < 1e-4

    @pytest.mark.parametrize("selector", list(QfiSelector))
    def test_twin_fock_balanced_everywhere(self, selector):
        sh = shorthand_for(InputStateSpec.separable(fock(2), fock(2)))
        t_best, _ = grid_verify(sh, selector, 50_000)
        assert abs(t_best - BALANCED_T) < 1e-4

    def test_vacuum_is_flat_zero(self):
        sh = shorthand_for(InputStateSpec.separable(vacuum(), vacuum()))
        _, f_best = grid_verify(sh, QfiSelector.TWO_PARAM, 10_000)
        assert f_best == 0.0


def test_reports_are_internally_consistent():
    rng = np.random.default_rng(23)
    for _ in range(40):
        sh = shorthand_for(random_spec(rng))
        for selector in (QfiSelector.TWO_PARAM, QfiSelector.ASYM, QfiSelector.SYM):
            report = optimize(sh, selector)
            values = [f for _, f in report.candidates]
            assert report.f_max == max(values)
            if report.t_opt is not None:
                assert any(t == report.t_opt and f == report.f_max for t, f in report.candidates)
            if "C1PosC2Zero" in report.case_label or "C1PosC3Zero" in report.case_label:
                assert report.t_opt == BALANCED_T
            if "Degenerate" in report.case_label and report.t_opt is not None:
                others = qfi_curve(sh, np.array([0.0, BALANCED_T, 1.0]), selector)
                assert all(report.f_max >= v - 1e-10 * sh.scale for v in others)


def test_analytic_optimum_matches_grid_for_random_states():
    rng = np.random.default_rng(29)
    for _ in range(50):
        sh = shorthand_for(random_spec(rng))
        for selector in (QfiSelector.TWO_PARAM, QfiSelector.ASYM, QfiSelector.SYM):
            report = optimize(sh, selector)
            _, grid_f = grid_verify(sh, selector, 20_000)
            assert abs(report.f_max - grid_f) <= 1e-8 * max(1.0, abs(report.f_max))
