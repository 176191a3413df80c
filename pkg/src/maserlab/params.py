"""System parameters and the rates derived from them.

All rates are angular (rad/s, written s^-1) unless a field name says otherwise.
The cavity decay convention is kappa_c = omega_c/Q with omega_c = 2*pi*nu_c;
the spin linewidth is kappa_s = q*w + 2/T2_star + gamma_eg, where q lumps the
pump-induced broadening of the magnon mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .constants import HBAR, KB, MU0
from .errors import ParameterError

# ln(max float) is ~709.78; beyond this the thermal occupation is zero anyway
_EXPM1_MAX_ARG = 700.0


@dataclass(frozen=True)
class SystemParams:
    """Physical inputs of one operating point.

    nu_c : cavity frequency, Hz
    Q : loaded cavity quality factor
    v_eff : cavity mode volume, m^3
    rho_nv : spin density, m^-3
    v_nv : pumped crystal volume, m^3
    t2_star : inhomogeneous spin dephasing time, s
    gamma_eg : excited-to-ground relaxation rate, s^-1
    w : optical pump rate, s^-1
    q : pump broadening multiplier entering kappa_s
    t : cavity temperature, K (0 allowed -> no thermal photons)
    l : cavity length used for round-trip loss and displacement lever arm, m
    b : optional static field, gauss; when set, the spin transition frequency
        is derived from it instead of being tied to the cavity
    gamma_nv_hz_per_gauss : gyromagnetic ratio, Hz/G
    d_zfs_hz : zero-field splitting, Hz
    orientation_divisor : fraction of spins in the addressed orientation and
        transition (density is divided by this)
    kappa_ex_fraction : fraction of kappa_c routed to the external port
    g_hz : optional direct single-spin coupling override, Hz; when unset the
        coupling is derived from the mode volume
    """

    nu_c: float
    Q: float
    v_eff: float
    rho_nv: float
    v_nv: float
    t2_star: float
    gamma_eg: float
    w: float
    t: float
    l: float
    q: float = 16.0
    b: Optional[float] = None
    gamma_nv_hz_per_gauss: float = 2.8e6
    d_zfs_hz: float = 2.87e9
    orientation_divisor: float = 12.0
    kappa_ex_fraction: float = 1.0
    g_hz: Optional[float] = None

    def __post_init__(self) -> None:
        positive = {
            "nu_c": self.nu_c, "Q": self.Q, "v_eff": self.v_eff,
            "rho_nv": self.rho_nv, "v_nv": self.v_nv, "t2_star": self.t2_star,
            "gamma_eg": self.gamma_eg, "w": self.w, "q": self.q, "l": self.l,
            "gamma_nv_hz_per_gauss": self.gamma_nv_hz_per_gauss,
            "d_zfs_hz": self.d_zfs_hz,
            "orientation_divisor": self.orientation_divisor,
        }
        for name, value in positive.items():
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.t) and self.t >= 0):
            raise ParameterError(f"t must be finite and >= 0, got {self.t!r}")
        if not (0 < self.kappa_ex_fraction <= 1):
            raise ParameterError(
                f"kappa_ex_fraction must lie in (0, 1], got {self.kappa_ex_fraction!r}")
        if self.b is not None and not (math.isfinite(self.b) and self.b >= 0):
            raise ParameterError(f"b must be finite and >= 0 gauss, got {self.b!r}")
        if self.g_hz is not None and not (math.isfinite(self.g_hz) and self.g_hz > 0):
            raise ParameterError(f"g_hz must be finite and > 0, got {self.g_hz!r}")


class TransitionFrequency(NamedTuple):
    frequency_hz: float
    inverted: bool   # True when the |-1> level lies below |0>


def transition_frequency(b_gauss: float, p: SystemParams) -> TransitionFrequency:
    """Spin transition frequency |gamma_nv*B - D_zfs| for a static field in gauss.

    Above the crossing field D_zfs/gamma_nv (~1025 G for stock values) the
    Zeeman term wins and the level order inverts; the returned flag reports it.
    """
    if not (math.isfinite(b_gauss) and b_gauss >= 0):
        raise ParameterError(f"b_gauss must be finite and >= 0, got {b_gauss!r}")
    zeeman = p.gamma_nv_hz_per_gauss * b_gauss
    return TransitionFrequency(abs(zeeman - p.d_zfs_hz), zeeman > p.d_zfs_hz)


@dataclass(frozen=True)
class DerivedRates:
    """Angular rates and occupations derived from SystemParams.

    Carries the raw knobs the downstream solvers need (w, gamma_eg, q, ...)
    so most operations take just this object.
    """

    omega_c: float        # cavity angular frequency, rad/s
    omega_s: float        # spin transition angular frequency, rad/s
    g: float              # single-spin coupling, rad/s
    n_spins: float        # N, spins in the addressed orientation
    kappa_c: float        # cavity decay, s^-1
    kappa_ex: float       # external-port part of kappa_c, s^-1
    kappa_s: float        # magnon decay, s^-1
    n_th: float           # thermal cavity occupation
    gamma_nv: float       # gyromagnetic ratio, rad s^-1 T^-1
    w: float
    gamma_eg: float
    q: float
    t2_star: float
    t: float
    l: float
    kappa_ex_fraction: float

    @property
    def resonant(self) -> bool:
        return self.omega_s == self.omega_c


def thermal_occupation(omega: float, t: float) -> float:
    """Bose occupation 1/(exp(hbar*omega/kB/T) - 1); exactly 0 at T = 0."""
    if t == 0.0:
        return 0.0
    x = HBAR * omega / (KB * t)
    if x > _EXPM1_MAX_ARG:
        return 0.0
    return 1.0 / math.expm1(x)


def coupling_from_geometry(omega_c: float, v_eff: float, gamma_nv: float) -> float:
    """Single-spin coupling gamma_nv * sqrt(mu0*hbar*omega_c / (2*V_eff)), rad/s.

    The square root is the zero-point magnetic field amplitude of the mode.
    """
    return gamma_nv * math.sqrt(MU0 * HBAR * omega_c / (2.0 * v_eff))


def derive_rates(p: SystemParams) -> DerivedRates:
    """Compute every rate the solvers consume from one SystemParams."""
    omega_c = 2.0 * math.pi * p.nu_c
    if p.b is not None:
        omega_s = 2.0 * math.pi * transition_frequency(p.b, p).frequency_hz
    else:
        omega_s = omega_c
    gamma_nv = 2.0 * math.pi * p.gamma_nv_hz_per_gauss * 1e4  # Hz/G -> rad/s/T
    if p.g_hz is not None:
        g = 2.0 * math.pi * p.g_hz
    else:
        g = coupling_from_geometry(omega_c, p.v_eff, gamma_nv)
    n_spins = p.rho_nv * p.v_nv / p.orientation_divisor
    kappa_c = omega_c / p.Q
    kappa_s = p.q * p.w + 2.0 / p.t2_star + p.gamma_eg
    return DerivedRates(
        omega_c=omega_c,
        omega_s=omega_s,
        g=g,
        n_spins=n_spins,
        kappa_c=kappa_c,
        kappa_ex=p.kappa_ex_fraction * kappa_c,
        kappa_s=kappa_s,
        n_th=thermal_occupation(omega_c, p.t),
        gamma_nv=gamma_nv,
        w=p.w,
        gamma_eg=p.gamma_eg,
        q=p.q,
        t2_star=p.t2_star,
        t=p.t,
        l=p.l,
        kappa_ex_fraction=p.kappa_ex_fraction,
    )
