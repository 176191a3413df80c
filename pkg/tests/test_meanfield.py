"""Mean-field steady states, thresholds and regime boundaries."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import make_rates
from maserlab import dynamics, meanfield
from maserlab.errors import RegimeError


def state_vector(state) -> np.ndarray:
    return np.array([state.n_e, state.n_g,
                     state.s_minus.real, state.s_minus.imag,
                     state.a.real, state.a.imag])


def detuned(r, delta_cs: float):
    """Rates with the spin line moved to realise a given drag detuning."""
    omega_s = r.omega_c - 0.5 * delta_cs * (r.kappa_c + r.kappa_s)
    return replace(r, omega_s=omega_s)


class TestThreshold:
    def test_threshold_kappa_reference(self, r0):
        assert meanfield.masing_threshold_kappa(r0) == \
            pytest.approx(421279.44499361026, rel=1e-13)

    def test_threshold_quality_reference(self, r0):
        assert meanfield.threshold_quality_factor(r0) == \
            pytest.approx(44743.59275189573, rel=1e-13)

    def test_zero_at_balanced_pump(self):
        r = make_rates(w=200.0)
        assert meanfield.masing_threshold_kappa(r) == 0.0

    def test_zero_at_zero_coupling(self, r0):
        assert meanfield.masing_threshold_kappa(replace(r0, g=0.0)) == 0.0

    def test_no_quality_factor_below_inversion(self):
        with pytest.raises(RegimeError):
            meanfield.threshold_quality_factor(make_rates(w=100.0))

    def test_over_pump_limit_reference(self, r0):
        assert meanfield.over_pump_limit(r0) == \
            pytest.approx(535398.1633974484, rel=1e-13)

    def test_strict_condition_flips_at_threshold(self, r0):
        kappa_th = meanfield.masing_threshold_kappa(r0)
        below = replace(r0, kappa_c=kappa_th * (1.0 - 1e-9))
        above = replace(r0, kappa_c=kappa_th * (1.0 + 1e-9))
        assert meanfield.is_masing(below)
        assert not meanfield.is_masing(above)

    def test_threshold_continuity_by_bisection(self, r0):
        # locate the masing flip in kappa_c independently and compare
        lo, hi = 1.0e4, 1.0e7
        assert meanfield.is_masing(replace(r0, kappa_c=lo))
        assert not meanfield.is_masing(replace(r0, kappa_c=hi))
        for _ in range(80):
            mid = math.sqrt(lo * hi)
            if meanfield.is_masing(replace(r0, kappa_c=mid)):
                lo = mid
            else:
                hi = mid
        assert hi == pytest.approx(meanfield.masing_threshold_kappa(r0),
                                   rel=1e-6)

    def test_photon_number_vanishes_at_threshold(self, r0):
        kappa_th = meanfield.masing_threshold_kappa(r0)

        def n_c(delta: float) -> float:
            r = replace(r0, kappa_c=kappa_th * (1.0 - delta),
                        kappa_ex=kappa_th * (1.0 - delta))
            return meanfield.steady_state(r).n_c

        # n_c shrinks linearly with distance below threshold
        assert n_c(1e-3) / n_c(1e-6) == pytest.approx(1e3, rel=1e-2)
        assert n_c(1e-6) < 1e-5 * n_c(0.5)


class TestSteadyState:
    def test_masing_reference_point(self, r0):
        st = meanfield.steady_state(r0)
        assert st.regime == meanfield.REGIME_MASING
        assert st.s_z == pytest.approx(1.6711865855685602e13, rel=1e-13)
        assert st.n_c == pytest.approx(5.485463556457849e12, rel=1e-12)
        assert st.p_out == pytest.approx(2.055378176874526e-06, rel=1e-12)
        assert st.omega == r0.omega_c
        assert st.delta_cs == 0.0

    def test_phase_convention(self, r0):
        st = meanfield.steady_state(r0)
        assert st.a.imag == 0.0 and st.a.real > 0.0
        # resonant spin response is purely imaginary, along +i
        assert st.s_minus.real == pytest.approx(0.0, abs=1e-9 * abs(st.s_minus))
        assert st.s_minus.imag > 0.0
        # with the clamped inversion, |S_-| = kappa_c*a/(2g) at resonance
        assert abs(st.s_minus) == pytest.approx(
            r0.kappa_c * st.a.real / (2.0 * r0.g), rel=1e-12)

    def test_masing_state_is_a_fixed_point(self, r0):
        st = meanfield.steady_state(r0)
        residual = dynamics.steady_residual(r0, state_vector(st))
        assert residual <= 1e-9

    def test_population_split(self, r0):
        st = meanfield.steady_state(r0)
        assert st.n_e + st.n_g == pytest.approx(r0.n_spins, rel=1e-12)
        assert st.n_e - st.n_g == pytest.approx(st.s_z, rel=1e-12)

    def test_below_threshold_dark_state(self):
        r = make_rates(Q=1.0e4)
        st = meanfield.steady_state(r)
        assert st.regime == meanfield.REGIME_BELOW
        assert st.n_c == 0.0 and st.a == 0j and st.s_minus == 0j
        dark = r.n_spins * (r.w - r.gamma_eg) / (r.w + r.gamma_eg)
        assert st.s_z == pytest.approx(dark, rel=1e-13)
        assert dynamics.steady_residual(r, state_vector(st)) <= 1e-12

    def test_over_pumped_dark_state(self):
        r = make_rates(w=6.0e5)
        st = meanfield.steady_state(r)
        assert st.regime == meanfield.REGIME_OVER_PUMPED
        assert st.n_c == 0.0

    def test_absorbing_pump_stays_dark(self):
        st = meanfield.steady_state(make_rates(w=100.0))
        assert st.regime == meanfield.REGIME_BELOW
        assert st.s_z < 0.0

    @pytest.mark.parametrize("delta_cs", [0.1, 1.0])
    def test_detuning_law_on_masing_branch(self, r0, delta_cs):
        resonant = meanfield.steady_state(r0).s_z
        st = meanfield.steady_state(detuned(r0, delta_cs))
        assert st.regime == meanfield.REGIME_MASING
        assert st.s_z / resonant == pytest.approx(1.0 + delta_cs ** 2,
                                                  rel=1e-9)

    @pytest.mark.parametrize("delta_cs", [0.1, 1.0, 3.0])
    def test_detuning_law_on_clamped_inversion(self, r0, delta_cs):
        ratio = meanfield.clamped_inversion(detuned(r0, delta_cs)) \
            / meanfield.clamped_inversion(r0)
        assert ratio == pytest.approx(1.0 + delta_cs ** 2, rel=1e-9)

    def test_detuned_masing_state_is_a_fixed_point(self, r0):
        r = detuned(r0, 0.5)
        st = meanfield.steady_state(r)
        residual = dynamics.steady_residual(r, state_vector(st),
                                            omega_frame=st.omega)
        assert residual <= 1e-9

    def test_gauge_freedom(self, r0):
        st = meanfield.steady_state(r0)
        y = state_vector(st)
        base = dynamics.steady_residual(r0, y)
        for k in range(8):
            phase = np.exp(1j * (2.0 * math.pi * k / 8.0 + 0.3))
            a = complex(y[4], y[5]) * phase
            s = complex(y[2], y[3]) * phase
            rotated = np.array([y[0], y[1], s.real, s.imag, a.real, a.imag])
            assert dynamics.steady_residual(r0, rotated) <= \
                max(1e-12, 10.0 * base)


class TestDraggedFrequency:
    def test_resonant_point_is_fixed(self, r0):
        assert meanfield.dragged_frequency(r0) == r0.omega_c

    def test_symmetric_rates_drag_to_midpoint(self, r0):
        omega_s = r0.omega_c - 1.0e4
        r = replace(r0, omega_s=omega_s, kappa_s=r0.kappa_c)
        assert meanfield.dragged_frequency(r) == \
            pytest.approx(0.5 * (r0.omega_c + omega_s), rel=1e-15)

    def test_drag_pulls_towards_narrow_line(self, r0):
        # kappa_s >> kappa_c: oscillation sits close to the cavity line
        omega_s = r0.omega_c - 1.0e6
        r = replace(r0, omega_s=omega_s)
        dragged = meanfield.dragged_frequency(r)
        assert abs(dragged - r0.omega_c) < abs(dragged - omega_s)
