"""Brute-force Fock engine: state construction, unitaries, moments, Fisher."""

import math

import numpy as np
import pytest

from helpers import rel
from mzqfi import fock_oracle as fo
from mzqfi.errors import CutoffTooSmall, TruncationWarning
from mzqfi.fisher_core import fisher_matrix, qfi_all
from mzqfi.shorthand import shorthand_for
from mzqfi.state_catalog import (
    InputStateSpec,
    coherent,
    fock,
    squeezed_coherent,
    squeezed_vacuum,
    tmsv,
    vacuum,
)

BALANCED = math.sqrt(0.5)


class TestBuildState:
    def test_fock_product_is_a_single_amplitude(self):
        spec = InputStateSpec.separable(fock(2), fock(1))
        state = fo.build_state(spec, 4)
        expected = np.zeros((5, 5))
        expected[2, 1] = 1.0
        assert np.array_equal(state.amplitudes, expected)
        assert state.truncated_norm == 1.0

    def test_twin_beam_amplitudes(self):
        r = 0.5
        state = fo.build_state(tmsv(r, 0.0), 30)
        n = np.arange(31)
        expected = (-math.tanh(r)) ** n / math.cosh(r)
        assert np.allclose(np.diagonal(state.amplitudes), expected, atol=1e-15)
        assert state.truncated_norm >= 1.0 - 1e-10

    def test_coherent_mean_photon_number(self):
        spec = InputStateSpec.separable(coherent(2.0, 0.0), vacuum())
        state = fo.build_state(spec, 40)
        weights = np.abs(state.amplitudes) ** 2
        mean = float((weights.sum(axis=1) * np.arange(41)).sum())
        assert abs(mean - 4.0) < 1e-10

    def test_cutoff_too_small_raises(self):
        with pytest.raises(CutoffTooSmall):
            fo.build_state(InputStateSpec.separable(vacuum(), coherent(2.0, 0.0)), 2)

    def test_truncation_warning_attached(self):
        spec = InputStateSpec.separable(vacuum(), coherent(2.0, 0.0))
        with pytest.warns(TruncationWarning):
            fo.build_state(spec, 12)

    def test_default_cutoff_meets_norm_gate(self):
        for spec in (
            InputStateSpec.separable(squeezed_vacuum(1.0, 0.2), coherent(2.0, 0.0)),
            tmsv(1.0, 0.0),
        ):
            state = fo.build_state(spec, fo.default_cutoff(spec))
            assert state.truncated_norm >= 1.0 - 1e-10


class TestApplyBs:
    def test_zero_angle_is_identity(self):
        spec = InputStateSpec.separable(coherent(1.0, 0.3), squeezed_vacuum(0.5, 0.1))
        state = fo.build_state(spec, 25)
        rotated = fo.apply_bs(state, 0.0)
        assert np.allclose(rotated.amplitudes, state.amplitudes, atol=1e-14)

    def test_single_photon_balanced_split(self):
        spec = InputStateSpec.separable(vacuum(), fock(1))
        state = fo.apply_bs(fo.build_state(spec, 4), fo.bs_angle(BALANCED))
        weights = np.abs(state.amplitudes) ** 2
        assert math.isclose(weights[0, 1], 0.5, rel_tol=1e-12)
        assert math.isclose(weights[1, 0], 0.5, rel_tol=1e-12)

    def test_norm_preserved_for_random_states(self):
        rng = np.random.default_rng(5)
        amps = rng.normal(size=(13, 13)) + 1j * rng.normal(size=(13, 13))
        amps /= np.linalg.norm(amps)
        state = fo.FockVector(12, amps, 1.0)
        rotated = fo.apply_bs(state, 1.234)
        assert abs(np.linalg.norm(rotated.amplitudes) - 1.0) < 1e-12

    def test_sector_conservation(self):
        rng = np.random.default_rng(6)
        amps = rng.normal(size=(11, 11)) + 1j * rng.normal(size=(11, 11))
        amps /= np.linalg.norm(amps)
        state = fo.FockVector(10, amps, 1.0)
        rotated = fo.apply_bs(state, 0.777)
        n = np.arange(11)
        total = n[:, None] + n[None, :]
        for sector in range(21):
            mask = total == sector
            before = np.sum(np.abs(amps[mask]) ** 2)
            after = np.sum(np.abs(rotated.amplitudes[mask]) ** 2)
            assert abs(before - after) < 1e-14

    def test_mean_field_transformation(self):
        # <n> in the upper arm of a coherent input must follow |T alpha|^2.
        spec = InputStateSpec.separable(coherent(1.5, 0.0), vacuum())
        state = fo.build_state(spec, 30)
        for t in (0.2, 0.6, 0.9):
            rotated = fo.apply_bs(state, fo.bs_angle(t))
            weights = np.abs(rotated.amplitudes) ** 2
            mean_upper = float((weights.sum(axis=1) * np.arange(31)).sum())
            assert abs(mean_upper - (t * 1.5) ** 2) < 1e-10

    def test_sector_block_unitarity(self):
        for total_n in (1, 5, 17):
            block = fo.sector_block(total_n, 0.9, cutoff=20)
            u = block.matrix
            assert np.allclose(u @ u.conj().T, np.eye(u.shape[0]), atol=1e-10)


class TestApplyPhases:
    def test_zero_phases_identity(self):
        state = fo.build_state(InputStateSpec.separable(coherent(1.0, 0.0), vacuum()), 20)
        shifted = fo.apply_phases(state, 0.0, 0.0)
        assert np.array_equal(shifted.amplitudes, state.amplitudes)

    def test_number_state_gets_global_phase_only(self):
        state = fo.build_state(InputStateSpec.separable(fock(2), fock(3)), 6)
        shifted = fo.apply_phases(state, 0.4, -1.1)
        ratio = shifted.amplitudes[2, 3] / state.amplitudes[2, 3]
        assert math.isclose(abs(ratio), 1.0, rel_tol=1e-14)
        mask = np.ones((7, 7), dtype=bool)
        mask[2, 3] = False
        assert np.all(shifted.amplitudes[mask] == 0)

    def test_interference_fringe_period(self):
        # A split single photon shows a phase-difference fringe with period 2 pi.
        spec = InputStateSpec.separable(vacuum(), fock(1))
        split = fo.apply_bs(fo.build_state(spec, 4), fo.bs_angle(BALANCED))

        def fringe(phase_diff):
            shifted = fo.apply_phases(split, phase_diff / 2.0, -phase_diff / 2.0)
            closed = fo.apply_bs(shifted, fo.bs_angle(BALANCED))
            weights = np.abs(closed.amplitudes) ** 2
            return float((weights.sum(axis=1) * np.arange(5)).sum())

        values = [fringe(p) for p in np.linspace(0.0, 2.0 * math.pi, 9)]
        assert math.isclose(values[0], values[-1], abs_tol=1e-12)
        assert max(values) - min(values) > 0.5


class TestOracleFisher:
    @pytest.mark.parametrize("t", [0.3, BALANCED, 0.95])
    def test_twin_fock_closed_form(self, t):
        n, m = 2, 1
        spec = InputStateSpec.separable(fock(m), fock(n))
        rotated = fo.apply_bs(fo.build_state(spec, 6), fo.bs_angle(t))
        matrix = fo.oracle_fisher(rotated)
        chi_sq = t * t * (1 - t * t)
        assert abs(matrix.f_ss) < 1e-12 and abs(matrix.f_sd) < 1e-12
        assert math.isclose(matrix.f_dd, 4 * chi_sq * (n + m + 2 * m * n), rel_tol=1e-11, abs_tol=1e-12)

    def test_single_photon_balanced(self):
        spec = InputStateSpec.separable(vacuum(), fock(1))
        rotated = fo.apply_bs(fo.build_state(spec, 4), fo.bs_angle(BALANCED))
        assert math.isclose(fo.oracle_fisher(rotated).f_dd, 1.0, rel_tol=1e-12)

    def test_vacuum_zero_matrix(self):
        spec = InputStateSpec.separable(vacuum(), vacuum())
        rotated = fo.apply_bs(fo.build_state(spec, 2), fo.bs_angle(0.8))
        matrix = fo.oracle_fisher(rotated)
        assert matrix.f_ss == matrix.f_dd == matrix.f_sd == 0.0

    def test_matches_analytic_path(self):
        spec = InputStateSpec.separable(
            squeezed_coherent(1.2, 0.5, 0.5, -0.7), squeezed_coherent(1.0, -0.9, 0.8, 0.3)
        )
        sh = shorthand_for(spec)
        base = fo.build_state(spec, fo.default_cutoff(spec))
        for t in (0.0, 0.4, BALANCED, 1.0):
            rotated = fo.apply_bs(base, fo.bs_angle(t))
            brute = fo.oracle_fisher(rotated)
            analytic = fisher_matrix(sh, t)
            for field in ("f_ss", "f_dd", "f_sd"):
                assert rel(getattr(analytic, field), getattr(brute, field)) < 1e-8

    def test_single_phase_qfis_match_matrix_combination(self):
        spec = InputStateSpec.separable(squeezed_vacuum(0.7, 0.4), coherent(1.1, -0.2))
        base = fo.build_state(spec, fo.default_cutoff(spec))
        sh = shorthand_for(spec)
        for t in (0.2, BALANCED, 0.9):
            rotated = fo.apply_bs(base, fo.bs_angle(t))
            fi, fi_upper = fo.oracle_single_phase_qfi(rotated)
            q = qfi_all(sh, t)
            assert rel(fi, q.f_i) < 1e-8
            assert rel(fi_upper, q.f_i_upper) < 1e-8


class TestOracleMoments:
    def test_requires_adequate_norm(self):
        with pytest.raises(CutoffTooSmall):
            fo.oracle_moments(InputStateSpec.separable(vacuum(), coherent(2.0, 0.0)), 12)

    def test_coherent_pair_cross_moment(self):
        spec = InputStateSpec.separable(coherent(0.9, 0.4), coherent(1.2, -0.3))
        moments = fo.oracle_moments(spec, 35)
        expected = (0.9 * np.exp(-0.4j)) * (1.2 * np.exp(-0.3j))
        assert abs(moments.cross_a0d_a1 - expected) < 1e-10

    def test_twin_beam_number_covariance(self):
        moments = fo.oracle_moments(tmsv(0.8, 0.0), fo.default_cutoff(tmsv(0.8, 0.0)))
        assert math.isclose(moments.cov_n0n1, math.sinh(1.6) ** 2 / 4.0, rel_tol=1e-10)

    def test_fock_vacuum_has_no_cross_moments(self):
        moments = fo.oracle_moments(InputStateSpec.separable(fock(3), vacuum()), 10)
        assert moments.cross_a0d_a1 == 0
        assert moments.cross_a0d2_a12 == 0
        assert moments.cross_a0d_n0_a1 == 0
        assert moments.cross_a0_a1d_n1 == 0


class TestSecondBeamSplitter:
    def test_invariance_small_coherent(self):
        spec = InputStateSpec.separable(vacuum(), coherent(1.0, 0.0))
        deviation = fo.bs2_invariance_check(spec, 0.8, [0.0, 0.5, 1.0])
        assert deviation <= 1e-6

    def test_sum_sum_element_unaffected_by_second_splitter(self):
        spec = InputStateSpec.separable(fock(1), coherent(1.0, 0.5))
        values = [
            fo.full_mzi_fisher(spec, 0.7, tp, 0.2, -0.4).f_ss for tp in (0.0, 0.3, 0.8, 1.0)
        ]
        assert max(values) - min(values) < 1e-8

    def test_trivial_second_splitter_matches_oracle(self):
        spec = InputStateSpec.separable(fock(1), coherent(1.0, 0.5))
        finite_diff = fo.full_mzi_fisher(spec, 0.7, 1.0)
        base = fo.apply_bs(fo.build_state(spec, fo.default_cutoff(spec)), fo.bs_angle(0.7))
        exact = fo.oracle_fisher(base)
        for field in ("f_ss", "f_dd", "f_sd"):
            assert abs(getattr(finite_diff, field) - getattr(exact, field)) < 1e-5
