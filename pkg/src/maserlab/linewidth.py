"""Emission linewidth and phase coherence of the masing steady state.

The phase of the emitted field diffuses under spontaneous spin flips, cavity
thermal noise and pump noise; the resulting Lorentzian full width is set by
the incoherent occupation n_incoh = n_th + N_e/S_z divided by the coherent
excitation stored in the combined spin-cavity mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NotMasingError
from .params import DerivedRates, SystemParams, derive_rates
from . import correlations

DEFAULT_GRID_POINTS = 200
DEFAULT_GRID_SPAN = (1e-6, 1e1)   # in units of the hybrid decay rate


@dataclass(frozen=True)
class PhaseNoiseResult:
    gamma_st: float       # phase diffusion rate, rad^2/s
    fwhm_hz: float        # emission full width at half maximum
    t_coh: float          # phase coherence time, s
    n_incoh: float        # incoherent quanta feeding the phase, n_th + N_e/S_z
    n_c: float
    n_s: float
    s_z: float
    n_e: float


@dataclass(frozen=True)
class PhaseNoiseSpectrum:
    omega: np.ndarray       # analysis frequency, rad/s
    total: np.ndarray       # phase noise spectral density, rad^2/(rad/s)
    spin_term: np.ndarray   # contribution driven by spin noise
    cavity_term: np.ndarray  # contribution driven by cavity (thermal) noise
    gamma_st: float          # low-frequency diffusion rate the spectrum approaches


@dataclass(frozen=True)
class OptimalCoherence:
    w_analytic: float
    t_coh_analytic: float
    w_numeric: float
    t_coh_numeric: float


def _masing_state(r: DerivedRates,
                  state: correlations.CorrelationState | None
                  ) -> correlations.CorrelationState:
    if state is None:
        state = correlations.steady_state(r)
    if not state.masing or state.s_z <= 0.0:
        raise NotMasingError("linewidth is defined only on the masing branch")
    return state


def schawlow_townes(r: DerivedRates,
                    state: correlations.CorrelationState | None = None
                    ) -> PhaseNoiseResult:
    """Phase diffusion rate, linewidth and coherence time of the maser line."""
    state = _masing_state(r, state)
    n_incoh = r.n_th + state.n_e / state.s_z
    stored_time = 2.0 * (1.0 / r.kappa_s + 1.0 / r.kappa_c) * (state.n_c + state.n_s)
    gamma_st = n_incoh / stored_time
    t_coh = 4.0 * (1.0 / r.kappa_c + 1.0 / r.kappa_s) * (state.n_c + state.n_s) \
        / n_incoh
    return PhaseNoiseResult(
        gamma_st=gamma_st,
        fwhm_hz=gamma_st / (2.0 * math.pi),
        t_coh=t_coh,
        n_incoh=n_incoh,
        n_c=state.n_c,
        n_s=state.n_s,
        s_z=state.s_z,
        n_e=state.n_e,
    )


def phase_noise_spectrum(r: DerivedRates,
                         omega: Sequence[float] | np.ndarray | None = None,
                         state: correlations.CorrelationState | None = None
                         ) -> PhaseNoiseSpectrum:
    """Spectral density of the emitted phase fluctuations.

    Normalised so that omega^2 * S(omega) approaches the diffusion rate
    gamma_st below the hybrid relaxation rate (kappa_c + kappa_s)/2.
    """
    state = _masing_state(r, state)
    hybrid = 0.5 * (r.kappa_c + r.kappa_s)
    if omega is None:
        lo, hi = DEFAULT_GRID_SPAN
        omega = np.logspace(math.log10(lo * hybrid), math.log10(hi * hybrid),
                            DEFAULT_GRID_POINTS)
    omega = np.asarray(omega, dtype=float)
    if omega.ndim != 1 or omega.size == 0 or np.any(omega <= 0.0):
        raise ValueError("omega grid must be one-dimensional and positive")
    denom = 4.0 * state.n_c * omega ** 2 * (hybrid ** 2 + omega ** 2)
    spin = r.g ** 2 * r.n_spins * r.kappa_s / denom
    cavity = (r.kappa_s ** 2 / 4.0 + omega ** 2) * r.kappa_c \
        * (1.0 + 2.0 * r.n_th) / denom
    return PhaseNoiseSpectrum(
        omega=omega,
        total=spin + cavity,
        spin_term=spin,
        cavity_term=cavity,
        gamma_st=schawlow_townes(r, state).gamma_st,
    )


def optimal_coherence(p: SystemParams) -> OptimalCoherence:
    """Pump rate maximising the coherence time, analytic and numeric.

    The analytic pump is the correlation optimum (2 N g^2 / kappa_c - 1/T2*)/q,
    where T_coh = 2 N^2 g^2 / (q n_th kappa_c^3) in the good-cavity limit; the
    numeric column maximises the full expression over the masing window.
    """
    r0 = derive_rates(p)
    if r0.n_th <= 0.0:
        raise NotMasingError(
            "the coherence optimum needs a thermal bath (T > 0)")
    w_an, _ = correlations.optimal_pump_for_correlation(p)
    t_an = 2.0 * r0.n_spins ** 2 * r0.g ** 2 / (r0.q * r0.n_th * r0.kappa_c ** 3)

    w_lo, w_hi = correlations.masing_pump_window(p)
    margin = 1e-9

    def negative_t_coh(log_w: float) -> float:
        r = derive_rates(replace(p, w=10.0 ** log_w))
        try:
            return -schawlow_townes(r).t_coh
        except NotMasingError:
            return 0.0

    res = minimize_scalar(
        negative_t_coh,
        bounds=(math.log10(w_lo) + margin, math.log10(w_hi) - margin),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return OptimalCoherence(
        w_analytic=w_an,
        t_coh_analytic=t_an,
        w_numeric=10.0 ** float(res.x),
        t_coh_numeric=-float(res.fun),
    )
