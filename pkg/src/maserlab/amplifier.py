"""Reflection amplifier response to an injected microwave tone.

The inverted ensemble acts as a negative resistance inside the cavity: a tone
entering through the coupling port leaves with gain set by how close the
saturated inversion sits to its clamp value. Saturation makes the fixed-point
equation for the inversion a cubic; in the masing window it has three real
branches and only the lowest is dynamically stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C0, HBAR, KB
from .errors import AtThresholdError, NumericalError, RegimeError
from .params import DerivedRates
from . import dynamics
from . import meanfield

REGIME_ABSORBING = "absorbing"
REGIME_AMPLIFYING = "amplifying"
REGIME_MASING = "masing"
REGIME_OVER_PUMPED = "over-pumped"


@dataclass(frozen=True)
class DriveSpec:
    """Injected tone: carrier power in watts and optional frequency.

    omega_in is the drive angular frequency; None means the cavity resonance.
    """
    p_in_w: float
    omega_in: float | None = None

    def __post_init__(self) -> None:
        if not (self.p_in_w > 0.0) or not math.isfinite(self.p_in_w):
            raise ValueError("drive power must be positive and finite")
        if self.omega_in is not None and not (self.omega_in > 0.0):
            raise ValueError("drive frequency must be positive")


@dataclass(frozen=True)
class WeakSignalGain:
    gain: float
    gain_db: float
    s_z: float


@dataclass(frozen=True)
class AmplifierBranch:
    s_z: float            # saturated inversion on this branch
    x: float              # inversion over its clamp value
    a: complex            # intracavity amplitude
    s_out: complex        # reflected flux amplitude
    gain: float            # |s_out/s_in|^2
    gain_db: float
    p_out_w: float         # reflected power, W
    t_n_k: float           # added-noise temperature, K (nan when undefined)
    stable: bool
    max_re_eig: float      # largest non-neutral eigenvalue real part


@dataclass(frozen=True)
class AmplifierResult:
    regime: str
    branches: tuple[AmplifierBranch, ...]   # sorted by inversion, ascending
    stable_index: int
    drive: DriveSpec
    s_in: float            # input flux amplitude, sqrt(photons/s)
    omega_in: float

    @property
    def stable_branch(self) -> AmplifierBranch:
        return self.branches[self.stable_index]


def classify_regime(r: DerivedRates) -> str:
    """Response class of the undriven system at these rates."""
    if r.w < r.gamma_eg:
        return REGIME_ABSORBING
    if r.w > meanfield.over_pump_limit(r):
        return REGIME_OVER_PUMPED
    if meanfield.is_masing(r):
        return REGIME_MASING
    return REGIME_AMPLIFYING


def weak_signal_gain(r: DerivedRates) -> WeakSignalGain:
    """Reflection gain in the vanishing-drive limit, resonant and matched.

    G = (A + B)^2 / (A - B)^2 with A the dark inversion and B its clamp
    value. Valid whenever the ensemble is inverted but not masing, which
    covers the amplifying label and the over-pumped region beyond w_max; at
    the masing boundary the expression diverges and AtThresholdError is
    raised.
    """
    regime = classify_regime(r)
    if regime not in (REGIME_AMPLIFYING, REGIME_OVER_PUMPED):
        raise RegimeError(f"weak-signal gain needs an inverted non-masing state, got {regime}")
    a_branch = meanfield.dark_inversion(r)
    b_branch = meanfield.clamped_inversion(r)
    if abs(a_branch - b_branch) <= 1e-12 * (abs(a_branch) + abs(b_branch)):
        raise AtThresholdError("weak-signal gain diverges at the masing threshold")
    gain = ((a_branch + b_branch) / (a_branch - b_branch)) ** 2
    return WeakSignalGain(gain=gain, gain_db=10.0 * math.log10(gain), s_z=a_branch)


def weak_drive_inversion(r: DerivedRates, drive: DriveSpec) -> float:
    """First saturation correction to the dark inversion for a weak tone."""
    a_branch = meanfield.dark_inversion(r)
    b_branch = meanfield.clamped_inversion(r)
    f_drive = saturation_flux(r, drive)
    return a_branch * (1.0 - 2.0 * b_branch * f_drive / (a_branch - b_branch) ** 2)


def locked_gain_estimate(r: DerivedRates, drive: DriveSpec) -> float:
    """Injection-locked gain estimate on the stable masing branch."""
    a_branch = meanfield.dark_inversion(r)
    b_branch = meanfield.clamped_inversion(r)
    if a_branch <= b_branch:
        raise RegimeError("injection locking requires the masing regime")
    omega_in = drive.omega_in if drive.omega_in is not None else r.omega_c
    flux_in = drive.p_in_w / (HBAR * omega_in)
    root = math.sqrt((r.w + r.gamma_eg) * (a_branch - b_branch) / (2.0 * flux_in))
    return (root - 1.0) ** 2


def saturation_flux(r: DerivedRates, drive: DriveSpec) -> float:
    """Drive strength F = 4 |s_in|^2 / (w + gamma_eg) entering the saturation."""
    omega_in = drive.omega_in if drive.omega_in is not None else r.omega_c
    return 4.0 * drive.p_in_w / (HBAR * omega_in) / (r.w + r.gamma_eg)


def noise_temperature(r: DerivedRates, gain: float, s_z: float) -> float:
    """Added-noise temperature of the reflection amplifier, in kelvin.

    Splits the added noise into a resistive-loss part at the bath temperature
    and a spin-emission part weighted by N_e/S_z. Undefined (nan) for lossy
    response or non-inverted spins; exactly zero at unit gain where the
    amplifier adds nothing.
    """
    if gain == 1.0:
        return 0.0
    if not (gain >= 1.0) or s_z <= 0.0:
        return math.nan
    gain_db = 10.0 * math.log10(gain)
    tau_rt = 2.0 * r.l / C0
    loss_db = 10.0 * r.kappa_c * tau_rt * math.log10(math.e)
    n_e = 0.5 * (r.n_spins + s_z)
    spin_quantum = (n_e / s_z) * HBAR * r.omega_c / KB
    return (1.0 - 1.0 / gain) * ((loss_db / gain_db) * r.t
                                 + (1.0 + loss_db / gain_db) * spin_quantum)


def _cubic_real_roots(p2: float, p1: float, p0: float) -> list[float]:
    """Real roots of u^3 + p2 u^2 + p1 u + p0 = 0, analytically.

    Depressed-cubic evaluation: the trigonometric form when all three roots
    are real, the cancellation-safe Cardano form (larger-magnitude cube root
    first) when only one is.
    """
    shift = p2 / 3.0
    p = p1 - p2 * shift
    q = p0 + shift * (2.0 * shift * shift - p1)
    half_q = 0.5 * q
    third_p = p / 3.0
    disc = half_q * half_q + third_p ** 3
    if disc > 0.0:
        s = math.sqrt(disc)
        t = -half_q + s if half_q <= 0.0 else -half_q - s
        c = math.copysign(abs(t) ** (1.0 / 3.0), t)
        v = c if p == 0.0 else c - third_p / c
        return [v - shift]
    if p == 0.0:
        return [-shift]
    m = 2.0 * math.sqrt(-third_p)
    cos_arg = 3.0 * q / (p * m)
    theta = math.acos(min(1.0, max(-1.0, cos_arg))) / 3.0
    return [m * math.cos(theta - 2.0 * math.pi * k / 3.0) - shift
            for k in range(3)]


def _saturation_roots(a_branch: float, b_branch: float, beta0: float,
                      sigma2: float, eta: float) -> list[float]:
    """Real roots of (A - u)*((beta0 - u/B)^2 + sigma2) = eta*u, ascending.

    beta0 and sigma2 carry the drive detunings (1 and 0 on resonance); eta
    collects the drive strength. Roots are Newton-polished on the unexpanded
    form, which stays well scaled near the close pair at weak drive.
    """
    b = b_branch
    scale = max(abs(a_branch), abs(b))
    raw = _cubic_real_roots(
        -(2.0 * beta0 * b + a_branch),
        (beta0 ** 2 + sigma2) * b ** 2 + 2.0 * a_branch * beta0 * b + eta * b ** 2,
        -a_branch * (beta0 ** 2 + sigma2) * b ** 2,
    )

    def f(u: float) -> float:
        return (a_branch - u) * ((beta0 - u / b) ** 2 + sigma2) - eta * u

    def fp(u: float) -> float:
        return -((beta0 - u / b) ** 2 + sigma2) \
            - 2.0 * (a_branch - u) * (beta0 - u / b) / b - eta

    roots: list[float] = []
    for z in raw:
        u = float(z)
        for _ in range(50):
            d = fp(u)
            if d == 0.0:
                break
            step = f(u) / d
            u -= step
            if abs(step) <= 1e-15 * max(abs(u), 1e-300):
                break
        roots.append(u)
    if not roots:
        raise NumericalError("saturation cubic returned no real root")
    roots.sort()
    # collapse duplicates the polish may have merged
    unique: list[float] = []
    for u in roots:
        if not unique or abs(u - unique[-1]) > 1e-9 * max(abs(u), scale, 1.0):
            unique.append(u)
    return unique


def drive_steady_state(r: DerivedRates, drive: DriveSpec) -> AmplifierResult:
    """All saturated fixed points under the injected tone, with stability.

    Handles arbitrary drive and transition detunings through the complex
    reflection response; on resonance with matched coupling it reduces to
    s_out/s_in = -(1 + x)/(1 - x) with x the inversion over its clamp.
    """
    omega_in = drive.omega_in if drive.omega_in is not None else r.omega_c
    s_in = dynamics.drive_amplitude(r, drive.p_in_w, omega_in)
    a_branch = meanfield.dark_inversion(r)
    # The clamp here is the bare resonant combination; every detuning,
    # including a static-field shift of the transition, enters the cubic
    # through beta0 and sigma2 below.
    b_branch = r.kappa_s * r.kappa_c / (4.0 * r.g ** 2)

    d_s = 2.0 * (omega_in - r.omega_s) / r.kappa_s
    d_c = 2.0 * (omega_in - r.omega_c) / r.kappa_c
    beta0 = 1.0 - d_s * d_c
    sigma2 = (d_s + d_c) ** 2
    coupling = 2.0 * r.kappa_ex / r.kappa_c
    eta = coupling * saturation_flux(r, drive) / b_branch

    branches = []
    for u in _saturation_roots(a_branch, b_branch, beta0, sigma2, eta):
        x = u / b_branch
        spin_pole = complex(0.5 * r.kappa_s, -(omega_in - r.omega_s))
        cavity_pole = complex(0.5 * r.kappa_c, -(omega_in - r.omega_c))
        denom = cavity_pole - r.g ** 2 * u / spin_pole
        if denom == 0.0:
            continue
        a = math.sqrt(r.kappa_ex) * s_in / denom
        s_minus = 1j * r.g * u * a / spin_pole
        s_out = s_in - math.sqrt(r.kappa_ex) * a
        gain = abs(s_out) ** 2 / s_in ** 2
        y = np.array([
            0.5 * (r.n_spins + u), 0.5 * (r.n_spins - u),
            s_minus.real, s_minus.imag, a.real, a.imag,
        ])
        report = dynamics.jacobian_stability(
            r, y, s_in=complex(s_in, 0.0), omega_frame=omega_in,
            exclude_phase_mode=False)
        branches.append(AmplifierBranch(
            s_z=u,
            x=x,
            a=a,
            s_out=s_out,
            gain=gain,
            gain_db=10.0 * math.log10(gain) if gain > 0.0 else -math.inf,
            p_out_w=abs(s_out) ** 2 * HBAR * omega_in,
            t_n_k=noise_temperature(r, gain, u),
            stable=report.stable,
            max_re_eig=float(max(ev.real for ev in report.eigenvalues)),
        ))
    stable_index = next((i for i, br in enumerate(branches) if br.stable), None)
    if stable_index is None:
        raise NumericalError("no dynamically stable drive branch found")
    return AmplifierResult(
        regime=classify_regime(r),
        branches=tuple(branches),
        stable_index=stable_index,
        drive=drive,
        s_in=s_in,
        omega_in=omega_in,
    )
