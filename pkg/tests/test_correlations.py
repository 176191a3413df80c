"""Second-order closure: steady states, pump optimum, scaling laws."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_params, make_rates
from maserlab import correlations, meanfield
from maserlab.errors import NotMasingError, RegimeError


def assert_closure_invariants(state, r) -> None:
    """Constraints every closure solution must satisfy, any regime."""
    n = r.n_spins
    assert state.n_e >= 0.0
    assert state.n_g >= 0.0
    assert state.n_e + state.n_g == pytest.approx(n, rel=1e-9)
    assert state.spin_corr >= 0.0
    assert state.n_c > 0.0
    if r.w >= r.gamma_eg:
        # net pumping cannot pull the mode below the thermal floor
        assert state.n_c >= r.n_th * (1.0 - 1e-12)
    # energy flow: photons leaving through the cavity match net spin pumping
    lhs = r.kappa_c * (state.n_c - r.n_th)
    rhs = r.w * state.n_g - r.gamma_eg * state.n_e
    scale = max(r.w * state.n_g, r.gamma_eg * state.n_e,
                r.kappa_c * state.n_c)
    assert abs(lhs - rhs) <= 1e-9 * scale
    assert correlations.max_closure_residual(state, r) <= 1e-12


class TestClosureSteadyState:
    def test_masing_reference_point(self, r0):
        state = correlations.steady_state(r0)
        assert state.masing
        assert state.s_z == pytest.approx(16711865849540.99, rel=1e-12)
        assert state.spin_corr == pytest.approx(3.0855732503187993e24, rel=1e-12)
        assert state.c_coll == pytest.approx(3.085573250291693e24, rel=1e-12)
        assert state.n_c == pytest.approx(5485463560174.179, rel=1e-12)
        assert state.n_e == pytest.approx(27105932924770.492, rel=1e-12)
        assert state.n_g == pytest.approx(10394067075229.5, rel=1e-12)
        assert state.flux == pytest.approx(1.0339855209379958e18, rel=1e-12)
        assert state.p_out == pytest.approx(2.055378178267018e-06, rel=1e-12)
        assert state.n_s == pytest.approx(state.spin_corr / state.s_z, rel=1e-12)
        assert_closure_invariants(state, r0)

    def test_pump_balance_point(self):
        # w = gamma_eg: no net inversion, spins uncorrelated, thermal cavity
        r = make_rates(w=200.0)
        state = correlations.steady_state(r)
        assert not state.masing
        assert abs(state.s_z) <= 1e-9 * r.n_spins
        assert state.spin_corr == pytest.approx(state.n_e, rel=1e-9)
        assert state.n_c == pytest.approx(r.n_th, rel=1e-2)
        assert state.n_c > r.n_th
        assert math.isnan(state.n_s)
        assert_closure_invariants(state, r)

    @pytest.mark.parametrize("w", [100.0, 150.0])
    def test_absorbing_pump_cools_the_mode(self, w):
        r = make_rates(w=w)
        state = correlations.steady_state(r)
        assert not state.masing
        assert state.s_z < 0.0
        assert state.n_c < r.n_th
        assert_closure_invariants(state, r)

    def test_below_threshold_pumped(self):
        # lossy cavity: the spins stay near the decoupled balance point while
        # amplified spontaneous emission lifts the mode above thermal
        r = make_rates(Q=1e4)
        state = correlations.steady_state(r)
        assert not state.masing
        assert state.s_z == pytest.approx(meanfield.dark_inversion(r), rel=1e-6)
        assert state.s_z < meanfield.dark_inversion(r)
        assert state.n_c > r.n_th
        assert_closure_invariants(state, r)

    @pytest.mark.parametrize("overrides", [
        dict(), dict(w=200.0), dict(w=100.0), dict(Q=1e4),
        dict(Q=1e6, w=3e4), dict(w=6e5),
    ])
    def test_quadratic_root_consistency(self, overrides):
        r = make_rates(**overrides)
        state = correlations.steady_state(r)
        c2, c1, c0 = correlations.closure_coefficients(r)
        terms = (c2 * state.s_z ** 2, c1 * state.s_z, c0)
        residual = abs(sum(terms)) / max(abs(t) for t in terms)
        assert residual <= 1e-9

    def test_detuned_transition_rejected(self):
        with pytest.raises(RegimeError):
            correlations.steady_state(make_rates(b=2100.0))

    @settings(max_examples=30, deadline=None)
    @given(log_q=st.floats(3.0, 7.0), log_w=st.floats(1.0, 6.0))
    def test_invariants_over_operating_range(self, log_q, log_w):
        r = make_rates(Q=10.0 ** log_q, w=10.0 ** log_w)
        assert_closure_invariants(correlations.steady_state(r), r)


class TestMeanFieldAgreement:
    @pytest.mark.parametrize("overrides", [
        dict(), dict(Q=2e5), dict(Q=1e6, w=3e4), dict(rho_nv=2e23),
    ])
    def test_photon_number_and_inversion_match(self, overrides):
        r = make_rates(**overrides)
        # all points sit at least twice above threshold, where finite-size
        # and thermal corrections to the factorised solution are negligible
        assert meanfield.masing_threshold_kappa(r) >= 2.0 * r.kappa_c
        mf = meanfield.steady_state(r)
        assert mf.regime == meanfield.REGIME_MASING
        state = correlations.steady_state(r)
        assert state.n_c == pytest.approx(mf.n_c, rel=1e-3)
        assert state.s_z == pytest.approx(mf.s_z, rel=1e-3)


class TestOptimalPump:
    def test_reference_values(self, p0):
        w_opt, corr_max = correlations.optimal_pump_for_correlation(p0)
        assert w_opt == pytest.approx(267699.0816987242, rel=1e-12)
        assert corr_max == pytest.approx(5.105362184415047e24, rel=1e-12)

    def test_closure_agrees_at_optimum(self, p0):
        # the analytic optimum drops gamma_eg, so only 1% agreement is owed
        w_opt, corr_max = correlations.optimal_pump_for_correlation(p0)
        state = correlations.steady_state(make_rates(w=w_opt))
        assert state.spin_corr == pytest.approx(corr_max, rel=1e-2)

    def test_golden_section_cross_check(self, p0):
        w_lo, w_hi = correlations.masing_pump_window(p0)
        phi = (math.sqrt(5.0) - 1.0) / 2.0

        def corr_at(log_w: float) -> float:
            return correlations.steady_state(make_rates(w=math.exp(log_w))).spin_corr

        a, b = math.log(w_lo * 1.01), math.log(w_hi * 0.99)
        c, d = b - phi * (b - a), a + phi * (b - a)
        fc, fd = corr_at(c), corr_at(d)
        for _ in range(80):
            if fc > fd:
                b, d, fd = d, c, fc
                c = b - phi * (b - a)
                fc = corr_at(c)
            else:
                a, c, fc = c, d, fd
                d = a + phi * (b - a)
                fd = corr_at(d)
        w_num = math.exp(0.5 * (a + b))
        corr_num = correlations.steady_state(make_rates(w=w_num)).spin_corr

        w_opt, corr_max = correlations.optimal_pump_for_correlation(p0)
        assert corr_num == pytest.approx(corr_max, rel=1e-2)
        assert w_num == pytest.approx(w_opt, rel=1e-2)

    def test_half_inversion_at_optimum(self, p0):
        w_opt, _ = correlations.optimal_pump_for_correlation(p0)
        r = make_rates(w=w_opt)
        state = correlations.steady_state(r)
        assert state.s_z == pytest.approx(r.n_spins / 2.0, rel=0.35)

    def test_weak_loss_limit(self):
        # kappa_c -> 0: the correction factor drops out of the maximum
        p = make_params(Q=1e12)
        r = make_rates(Q=1e12)
        _, corr_max = correlations.optimal_pump_for_correlation(p)
        assert corr_max == pytest.approx(r.n_spins ** 2 / (8.0 * p.q), rel=1e-6)

    def test_raises_when_nothing_mases(self):
        with pytest.raises(NotMasingError):
            correlations.optimal_pump_for_correlation(make_params(Q=1e4))


class TestPumpWindow:
    def test_reference_edges(self, p0):
        w_lo, w_hi = correlations.masing_pump_window(p0)
        assert w_lo == pytest.approx(387.21528345825595, rel=1e-9)
        assert w_hi == pytest.approx(534798.4481139769, rel=1e-9)

    def test_edges_bracket_the_masing_flag(self, p0):
        w_lo, w_hi = correlations.masing_pump_window(p0)
        for w, inside in [(w_lo * 1.001, True), (w_lo * 0.999, False),
                          (w_hi * 0.999, True), (w_hi * 1.001, False)]:
            assert correlations.steady_state(make_rates(w=w)).masing is inside

    def test_upper_edge_near_over_pump_limit(self, p0, r0):
        # the closed-form limit drops gamma_eg, so it sits slightly high
        _, w_hi = correlations.masing_pump_window(p0)
        w_max = meanfield.over_pump_limit(r0)
        assert w_hi <= w_max
        assert w_hi >= 0.98 * w_max

    def test_lower_edge_above_pump_balance(self, p0):
        w_lo, _ = correlations.masing_pump_window(p0)
        assert 200.0 < w_lo < 400.0

    def test_no_window_in_lossy_cavity(self):
        with pytest.raises(NotMasingError):
            correlations.masing_pump_window(make_params(Q=1e4))

    def test_detuned_transition_rejected(self):
        with pytest.raises(RegimeError):
            correlations.masing_pump_window(make_params(b=2100.0))


class TestSuperradiantScaling:
    @staticmethod
    def _doubling_error(rho: float) -> float:
        def power(density: float) -> float:
            p = make_params(rho_nv=density)
            w_opt, _ = correlations.optimal_pump_for_correlation(p)
            return correlations.steady_state(
                make_rates(rho_nv=density, w=w_opt)).p_out

        return abs(power(2.0 * rho) / power(rho) / 4.0 - 1.0)

    def test_doubling_density_quadruples_power(self):
        # output scales with the square of the spin number once the collective
        # decay dominates; finite-size corrections fall off like 1/N, so the
        # check sits at 64x the reference density
        assert self._doubling_error(6.4e24) <= 0.01

    def test_quadratic_law_is_asymptotic(self):
        errors = [self._doubling_error(s * 1e23) for s in (16.0, 32.0, 64.0)]
        assert errors[0] > errors[1] > errors[2]


class TestMasingEvidence:
    def test_collective_dominance_when_masing(self, r0):
        state = correlations.steady_state(r0)
        assert state.spin_corr / state.n_e > 1e6

    @pytest.mark.parametrize("overrides", [
        dict(w=200.0), dict(w=210.0),
        # at room temperature the thermal field amplifies precursor
        # correlations below threshold, so near-unity ratios additionally
        # need a cold cavity once the ensemble is inverted
        dict(w=200.0, t=0.0), dict(Q=1e4, t=0.0),
    ])
    def test_uncorrelated_spins_without_collective_emission(self, overrides):
        state = correlations.steady_state(make_rates(**overrides))
        assert not state.masing
        assert 0.5 <= state.spin_corr / state.n_e <= 2.0

    def test_continuity_across_threshold_in_quality_factor(self, r0):
        q_th = meanfield.threshold_quality_factor(r0)

        def gap(eps: float) -> tuple[float, float]:
            lo = correlations.steady_state(make_rates(Q=q_th * (1.0 - eps)))
            hi = correlations.steady_state(make_rates(Q=q_th * (1.0 + eps)))
            assert not lo.masing
            assert hi.masing
            return (abs(hi.spin_corr - lo.spin_corr) / lo.spin_corr,
                    abs(hi.n_c - lo.n_c) / lo.n_c)

        corr_9, n_c_9 = gap(1e-9)
        corr_12, n_c_12 = gap(1e-12)
        # the transition is steep but continuous: the two-sided gap shrinks
        # in proportion to the step
        assert corr_9 <= 2e-4 and n_c_9 <= 2e-4
        assert corr_12 <= corr_9 / 500.0
        assert n_c_12 <= n_c_9 / 500.0

    def test_no_jump_on_a_fine_quality_grid(self, r0):
        q_th = meanfield.threshold_quality_factor(r0)
        grid = np.geomspace(q_th * (1.0 - 1e-6), q_th * (1.0 + 1e-6), 41)
        corr = np.array([correlations.steady_state(make_rates(Q=float(q))).spin_corr
                         for q in grid])
        steps = np.abs(np.diff(corr)) / corr[:-1]
        assert float(steps.max()) <= 1e-2
