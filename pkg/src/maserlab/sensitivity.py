"""Magnetometry and displacement sensing with the masing output.

A magnetic field shifts the spin transition and a mirror displacement shifts
the cavity resonance; frequency dragging converts either into a shift of the
emitted tone. The smallest detectable input integrates down with the phase
diffusion rate, weighted by how strongly the respective resonator pins the
emission frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .params import DerivedRates
from . import correlations
from . import linewidth as lw

MODE_MAGNETIC = "magnetic"
MODE_DISPLACEMENT = "displacement"


@dataclass(frozen=True)
class SensitivityResult:
    delta_b: float        # field resolution at 1 s averaging, T/sqrt(Hz)
    omega_max_b: float    # analysis bandwidth for field sensing, rad/s
    delta_x: float        # displacement resolution at 1 s averaging, m/sqrt(Hz)
    omega_max_x: float    # analysis bandwidth for displacement sensing, rad/s
    gamma_st: float       # underlying phase diffusion rate, rad^2/s


@dataclass(frozen=True)
class OutputNoiseSpectrum:
    mode: str
    omega: np.ndarray       # analysis frequency, rad/s
    total: np.ndarray       # photocurrent spectral density over shot level
    shot: np.ndarray        # unity vacuum floor
    background: np.ndarray  # phase diffusion leaking into the measurement
    signal: np.ndarray      # response to the injected calibration input
    injected: float          # calibration input amplitude (T or m per sqrt(Hz))


def sensitivities(r: DerivedRates,
                  state: correlations.CorrelationState | None = None
                  ) -> SensitivityResult:
    """Field and displacement resolutions of the running maser."""
    noise = lw.schawlow_townes(r, state)
    root = math.sqrt(noise.gamma_st)
    delta_b = (1.0 + r.kappa_s / r.kappa_c) * root / r.gamma_nv
    delta_x = (r.l / r.omega_c) * (1.0 + r.kappa_c / r.kappa_s) * root
    corner = math.sqrt(2.0 * noise.n_incoh) * r.kappa_c * r.kappa_s \
        / (r.kappa_c + r.kappa_s)
    return SensitivityResult(
        delta_b=delta_b,
        omega_max_b=min(corner, 0.5 * (r.kappa_c + r.kappa_s)),
        delta_x=delta_x,
        omega_max_x=min(corner, 0.5 * r.kappa_s),
        gamma_st=noise.gamma_st,
    )


def output_noise_spectrum(r: DerivedRates,
                          mode: str = MODE_MAGNETIC,
                          omega: Sequence[float] | np.ndarray | None = None,
                          injected: float | None = None,
                          state: correlations.CorrelationState | None = None
                          ) -> OutputNoiseSpectrum:
    """Homodyne output spectral density split into its physical pieces.

    The signal term is evaluated for a calibration input of size `injected`
    (defaults to the computed sensitivity limit, making signal and background
    cross at low frequency). All terms are referenced to the unity shot
    floor.
    """
    if mode not in (MODE_MAGNETIC, MODE_DISPLACEMENT):
        raise ValueError(f"unknown sensing mode {mode!r}")
    if state is None:
        state = correlations.steady_state(r)
    noise = lw.schawlow_townes(r, state)
    hybrid = 0.5 * (r.kappa_c + r.kappa_s)
    if omega is None:
        omega = np.logspace(math.log10(1e-6 * hybrid), math.log10(10.0 * hybrid),
                            lw.DEFAULT_GRID_POINTS)
    omega = np.asarray(omega, dtype=float)
    if omega.ndim != 1 or omega.size == 0 or np.any(omega <= 0.0):
        raise ValueError("omega grid must be one-dimensional and positive")

    if injected is None:
        sens = sensitivities(r, state)
        injected = sens.delta_b if mode == MODE_MAGNETIC else sens.delta_x

    pref = 4.0 * r.kappa_c * state.n_c / omega ** 2
    lorentz = hybrid ** 2 + omega ** 2
    background = pref * (0.25 * r.kappa_s ** 2 / lorentz) \
        * noise.n_incoh * r.kappa_c / (2.0 * state.n_c)
    if mode == MODE_MAGNETIC:
        response = (0.25 * r.kappa_c ** 2 / lorentz) * (r.gamma_nv * injected) ** 2
    else:
        response = ((0.25 * r.kappa_s ** 2 + omega ** 2) / lorentz) \
            * (r.omega_c * injected / r.l) ** 2
    signal = pref * response
    shot = np.ones_like(omega)
    return OutputNoiseSpectrum(
        mode=mode,
        omega=omega,
        total=shot + background + signal,
        shot=shot,
        background=background,
        signal=signal,
        injected=injected,
    )
