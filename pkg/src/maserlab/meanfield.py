"""First-order (mean-field) steady state of the driven spin-cavity system.

The working variables are the collective inversion S_z = N_e - N_g, the
collective lowering amplitude S_- and the cavity amplitude a, all in the frame
rotating at the oscillation frequency. Above threshold the inversion clamps at
S_z = kappa_s*kappa_c*(1 + delta_cs^2)/(4 g^2) and the oscillation frequency is
dragged to omega = (kappa_c*omega_s + kappa_s*omega_c)/(kappa_c + kappa_s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import HBAR
from .errors import NumericalError, RegimeError
from .params import DerivedRates

REGIME_BELOW = "below-threshold"
REGIME_MASING = "masing"
REGIME_OVER_PUMPED = "over-pumped"


@dataclass(frozen=True)
class MeanFieldState:
    regime: str
    s_z: float            # collective inversion
    n_c: float            # cavity photon number |a|^2
    n_s: float            # magnon number |S_-|^2 / S_z (0 when dark)
    n_e: float            # excited population
    n_g: float            # ground population
    a: complex            # cavity amplitude (real positive by gauge choice)
    s_minus: complex      # collective lowering amplitude
    omega: float          # dragged oscillation frequency, rad/s
    delta_cs: float       # 2*(omega_c - omega_s)/(kappa_c + kappa_s)
    p_out: float          # hbar*omega_c*kappa_ex*n_c, W


def dark_inversion(r: DerivedRates) -> float:
    """Inversion of the uncoupled (dark) branch, N*(w - gamma)/(w + gamma)."""
    return r.n_spins * (r.w - r.gamma_eg) / (r.w + r.gamma_eg)


def clamped_inversion(r: DerivedRates) -> float:
    """Saturated inversion kappa_s*kappa_c*(1 + delta_cs^2)/(4 g^2)."""
    return r.kappa_s * r.kappa_c * (1.0 + drag_detuning(r) ** 2) / (4.0 * r.g ** 2)


def drag_detuning(r: DerivedRates) -> float:
    return 2.0 * (r.omega_c - r.omega_s) / (r.kappa_c + r.kappa_s)


def dragged_frequency(r: DerivedRates) -> float:
    if r.omega_s == r.omega_c:
        return r.omega_c
    return (r.kappa_c * r.omega_s + r.kappa_s * r.omega_c) / (r.kappa_c + r.kappa_s)


def masing_threshold_kappa(r: DerivedRates) -> float:
    """Largest cavity decay that still allows masing at this pump (resonant form).

    kappa_c^th = (4 g^2 / kappa_s) * ((w - gamma_eg)/(w + gamma_eg)) * N.
    Zero when the pump exactly balances relaxation and negative below that;
    either way no positive kappa_c supports masing.
    """
    return 4.0 * r.g ** 2 * dark_inversion(r) / r.kappa_s


def over_pump_limit(r: DerivedRates) -> float:
    """Pump rate beyond which pump broadening kills masing, (4g^2 N/kappa_c - 2/T2*)/q."""
    return (4.0 * r.g ** 2 * r.n_spins / r.kappa_c - 2.0 / r.t2_star) / r.q


def is_masing(r: DerivedRates) -> bool:
    """Strict masing condition including the detuning correction."""
    return dark_inversion(r) > clamped_inversion(r)


def steady_state(r: DerivedRates) -> MeanFieldState:
    """Stable mean-field fixed point for the given rates.

    Dark branch (a = S_- = 0) below threshold and in the over-pumped region;
    oscillating branch with clamped inversion when masing.
    """
    n = r.n_spins
    omega = dragged_frequency(r)
    delta_cs = drag_detuning(r)
    if is_masing(r):
        s_z = clamped_inversion(r)
        n_c = ((r.w - r.gamma_eg) * n - (r.w + r.gamma_eg) * s_z) / (2.0 * r.kappa_c)
        if n_c <= 0.0:
            raise NumericalError("masing branch produced a non-positive photon number")
        a = complex(math.sqrt(n_c), 0.0)
        # spin response in the dragged frame: S_- = i g S_z a / (kappa_s/2 - i (omega - omega_s))
        denom = complex(r.kappa_s / 2.0, -(omega - r.omega_s))
        s_minus = 1j * r.g * s_z * a / denom
        n_s = abs(s_minus) ** 2 / s_z
        regime = REGIME_MASING
    else:
        s_z = dark_inversion(r)
        n_c = 0.0
        n_s = 0.0
        a = 0j
        s_minus = 0j
        # over-pumped only where a masing window exists at all (w_max > 0);
        # a cavity too lossy to mase at any pump is plain below-threshold
        w_max = over_pump_limit(r)
        regime = REGIME_OVER_PUMPED if 0.0 < w_max < r.w else REGIME_BELOW
    return MeanFieldState(
        regime=regime,
        s_z=s_z,
        n_c=n_c,
        n_s=n_s,
        n_e=(n + s_z) / 2.0,
        n_g=(n - s_z) / 2.0,
        a=a,
        s_minus=s_minus,
        omega=omega,
        delta_cs=delta_cs,
        p_out=HBAR * r.omega_c * r.kappa_ex * n_c,
    )


def threshold_quality_factor(r: DerivedRates) -> float:
    """Q at the masing boundary for this pump, omega_c / kappa_c^th.

    Raises RegimeError when the pump cannot invert the ensemble, where no
    finite Q reaches threshold.
    """
    kappa_th = masing_threshold_kappa(r)
    if kappa_th <= 0.0:
        raise RegimeError(
            f"no finite threshold Q below inversion: w={r.w} <= gamma_eg={r.gamma_eg}")
    return r.omega_c / kappa_th
