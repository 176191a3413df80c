"""Magnetometry and displacement sensing limits of the masing output."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import make_rates
from maserlab import correlations, linewidth, sensitivity
from maserlab.errors import NotMasingError

MASING_POINTS = [
    dict(), dict(Q=1e5, w=2.7e5), dict(Q=1e6, w=1e4), dict(Q=1e6, w=1e6),
]


class TestSensitivities:
    def test_reference_point(self, r0):
        res = sensitivity.sensitivities(r0)
        assert res.delta_b == pytest.approx(1.01070388335345e-12, rel=1e-12)
        assert res.delta_x == pytest.approx(1.587553249118611e-14, rel=1e-12)
        assert res.omega_max_b == pytest.approx(2894347.7796076937, rel=1e-12)
        assert res.omega_max_x == pytest.approx(0.5 * r0.kappa_s, rel=1e-12)
        assert res.gamma_st == pytest.approx(3.352466872353323e-05, rel=1e-12)
        # headline windows: near 1 pT/sqrt(Hz) and 16 fm/sqrt(Hz)
        assert 0.95e-12 <= res.delta_b <= 1.10e-12
        assert 15.2e-15 <= res.delta_x <= 16.8e-15

    @pytest.mark.parametrize("overrides", MASING_POINTS)
    def test_both_reduce_to_the_same_diffusion_root(self, overrides):
        r = make_rates(**overrides)
        res = sensitivity.sensitivities(r)
        pn = linewidth.schawlow_townes(r)
        root = math.sqrt(2.0 / pn.t_coh)
        stripped_b = res.delta_b * r.gamma_nv / (1.0 + r.kappa_s / r.kappa_c)
        stripped_x = res.delta_x * r.omega_c / r.l / (1.0 + r.kappa_c / r.kappa_s)
        assert stripped_b == pytest.approx(root, rel=1e-9)
        assert stripped_x == pytest.approx(root, rel=1e-9)
        assert res.delta_b > 0.0
        assert res.delta_x > 0.0

    def test_symmetric_rates_prefactor(self, r0):
        r = replace(r0, kappa_s=r0.kappa_c)
        res = sensitivity.sensitivities(r)
        root = math.sqrt(res.gamma_st)
        assert res.delta_b * r.gamma_nv / root == pytest.approx(2.0, rel=1e-12)
        assert res.delta_x * r.omega_c / r.l / root == \
            pytest.approx(2.0, rel=1e-12)

    def test_scales_with_inverse_root_coherence(self, r0):
        t0 = linewidth.schawlow_townes(r0).t_coh
        base = sensitivity.sensitivities(r0)

        def coherence_gap(mult: float) -> float:
            return linewidth.schawlow_townes(
                make_rates(rho_nv=mult * 1e23)).t_coh - 2.0 * t0

        mult = brentq(coherence_gap, 1.0, 3.0, xtol=1e-12, rtol=1e-14)
        doubled = sensitivity.sensitivities(make_rates(rho_nv=mult * 1e23))
        assert doubled.delta_b / base.delta_b == \
            pytest.approx(1.0 / math.sqrt(2.0), rel=1e-9)
        assert doubled.delta_x / base.delta_x == \
            pytest.approx(1.0 / math.sqrt(2.0), rel=1e-9)

    def test_quality_factor_tradeoff(self):
        def at(q_factor: float) -> sensitivity.SensitivityResult:
            return sensitivity.sensitivities(make_rates(Q=q_factor))

        ladder = [at(qf) for qf in (1e5, 1e6, 1e7, 1e8, 1e9)]
        # displacement sensing rides the narrowing linewidth at every Q
        for lo, hi in zip(ladder, ladder[1:]):
            assert hi.delta_x < lo.delta_x
        # field sensing first gains from the narrower line, then loses to the
        # dragging prefactor (1 + kappa_s/kappa_c), which grows faster than
        # the diffusion root shrinks; asymptotically delta_b grows as sqrt(Q)
        assert ladder[1].delta_b < ladder[0].delta_b
        assert ladder[2].delta_b > ladder[1].delta_b
        assert ladder[3].delta_b > ladder[2].delta_b
        assert ladder[4].delta_b > 1.5 * ladder[3].delta_b

    def test_rejects_non_masing_states(self):
        with pytest.raises(NotMasingError):
            sensitivity.sensitivities(make_rates(w=200.0))


class TestOutputNoiseSpectrum:
    def test_magnetic_signal_crosses_background_everywhere(self, r0):
        hybrid = 0.5 * (r0.kappa_c + r0.kappa_s)
        sp = sensitivity.output_noise_spectrum(
            r0, omega=[1e-4 * hybrid, 1e-2 * hybrid, hybrid, 10.0 * hybrid])
        np.testing.assert_allclose(sp.signal, sp.background, rtol=1e-9)

    def test_displacement_crossing_in_the_slow_window(self, r0):
        grid = np.array([1e-3, 0.02, 0.04, 0.5]) * r0.kappa_s
        sp = sensitivity.output_noise_spectrum(
            r0, mode=sensitivity.MODE_DISPLACEMENT, omega=grid)
        ratio = sp.signal / sp.background
        np.testing.assert_allclose(
            ratio, 1.0 + 4.0 * grid ** 2 / r0.kappa_s ** 2, rtol=1e-9)
        # within the stated analysis band the crossing holds to 1%
        assert np.all(ratio[grid <= 0.05 * r0.kappa_s] <= 1.01)

    def test_zero_injection_leaves_floor_and_background(self, r0):
        sp = sensitivity.output_noise_spectrum(r0, injected=0.0)
        assert np.all(sp.signal == 0.0)
        np.testing.assert_allclose(sp.total, 1.0 + sp.background, rtol=1e-12)

    def test_shot_floor_at_high_frequency(self, r0):
        # the displacement response rolls off two powers slower than the
        # magnetic one, so the common floor check sits well past the corner
        hybrid = 0.5 * (r0.kappa_c + r0.kappa_s)
        for mode in (sensitivity.MODE_MAGNETIC, sensitivity.MODE_DISPLACEMENT):
            sp = sensitivity.output_noise_spectrum(
                r0, mode=mode, omega=[1e4 * hybrid])
            assert abs(float(sp.total[0]) - 1.0) <= 1e-5

    def test_components_and_default_injection(self, r0):
        res = sensitivity.sensitivities(r0)
        for mode, limit in ((sensitivity.MODE_MAGNETIC, res.delta_b),
                            (sensitivity.MODE_DISPLACEMENT, res.delta_x)):
            sp = sensitivity.output_noise_spectrum(r0, mode=mode)
            assert sp.injected == pytest.approx(limit, rel=1e-12)
            assert sp.omega.shape == (linewidth.DEFAULT_GRID_POINTS,)
            assert np.all(sp.shot == 1.0)
            assert np.all(sp.background > 0.0)
            assert np.all(sp.signal > 0.0)
            np.testing.assert_allclose(
                sp.total, sp.shot + sp.background + sp.signal, rtol=1e-12)

    def test_signal_is_quadratic_in_the_injection(self, r0):
        base = sensitivity.output_noise_spectrum(r0)
        scaled = sensitivity.output_noise_spectrum(
            r0, injected=2.0 * base.injected)
        np.testing.assert_allclose(scaled.signal, 4.0 * base.signal, rtol=1e-12)
        np.testing.assert_allclose(scaled.background, base.background, rtol=1e-12)

    def test_accepts_precomputed_state(self, r0):
        state = correlations.steady_state(r0)
        direct = sensitivity.output_noise_spectrum(r0)
        via_state = sensitivity.output_noise_spectrum(r0, state=state)
        np.testing.assert_allclose(via_state.total, direct.total, rtol=0.0)

    def test_rejects_unknown_mode(self, r0):
        with pytest.raises(ValueError):
            sensitivity.output_noise_spectrum(r0, mode="thermal")

    @pytest.mark.parametrize("grid", [
        [0.0, 1.0], [-1.0, 1.0], [], [[1.0, 2.0]],
    ])
    def test_rejects_bad_grids(self, r0, grid):
        with pytest.raises(ValueError):
            sensitivity.output_noise_spectrum(r0, omega=grid)

    def test_rejects_non_masing_states(self):
        with pytest.raises(NotMasingError):
            sensitivity.output_noise_spectrum(make_rates(Q=1e4))
