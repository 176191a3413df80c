"""Second-order correlation closure for the spin-cavity steady state.

Factorising third moments while keeping second-order correlators exact turns
the stationarity conditions into a single quadratic for the inversion S_z.
Everything else (photon number, collective spin correlation, emission flux)
follows by back-substitution. The closure is formulated on resonance
(omega_s = omega_c); a detuned transition raises RegimeError.

Numerics: the physical root of the quadratic is the smaller one. It sits
within a few parts in 1e10 of one of the mean-field branches, so solving for
S_z directly wastes most of the mantissa on the branch value. The solver
works in the shift delta = S_z - ref, where ref is the mean-field branch
predicted by the threshold condition, with the coefficients rearranged so the
branch value cancels symbolically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .constants import HBAR
from .errors import NoRealRootError, NotMasingError, NumericalError, RegimeError
from .params import DerivedRates, SystemParams, derive_rates
from . import meanfield

_RESONANCE_TOL = 1e-9  # max |delta_cs| the closure accepts


@dataclass(frozen=True)
class CorrelationState:
    masing: bool
    s_z: float            # inversion from the closure quadratic
    spin_corr: float      # <S_+ S_-> = N_e + C_coll
    c_coll: float         # collective part, S_z * P / (2 kappa_s)
    n_c: float            # cavity photon number
    n_s: float            # spin_corr / S_z, nan when S_z <= 0
    n_e: float
    n_g: float
    flux: float           # photon emission flux into the cavity, kappa_c*(n_c - n_th)
    p_out: float          # output power hbar*omega_c*kappa_ex*n_c, W


def _check_resonant(r: DerivedRates) -> None:
    delta = meanfield.drag_detuning(r)
    if abs(delta) > _RESONANCE_TOL:
        raise RegimeError(
            "the correlation closure is formulated on resonance; "
            f"got delta_cs={delta:.3e}")


def closure_coefficients(r: DerivedRates) -> tuple[float, float, float]:
    """Raw quadratic coefficients (c2, c1, c0) with c2*S_z^2 + c1*S_z + c0 = 0.

    Kept for diagnostics; steady_state solves the better-conditioned shifted
    form instead.
    """
    n = r.n_spins
    wg = r.w + r.gamma_eg
    d = (1.0 - 1.0 / n) / r.kappa_s + 1.0 / r.kappa_c
    k = (r.kappa_s + r.kappa_c) / (4.0 * r.g ** 2)
    c2 = wg * d
    c1 = -((r.w - r.gamma_eg) * n * d + wg * k + 1.0 + 2.0 * r.n_th)
    c0 = n * ((r.w - r.gamma_eg) * k - 1.0)
    return c2, c1, c0


def steady_state(r: DerivedRates) -> CorrelationState:
    """Solve the closure for the stationary second-order state."""
    _check_resonant(r)
    n = r.n_spins
    if n <= 1.0:
        raise NumericalError("the closure needs more than one spin")
    wg = r.w + r.gamma_eg
    a_branch = meanfield.dark_inversion(r)
    b_branch = meanfield.clamped_inversion(r)
    masing = a_branch > b_branch

    d = (1.0 - 1.0 / n) / r.kappa_s + 1.0 / r.kappa_c
    # K - D*B simplifies exactly to kappa_c/(4 g^2 N); using the simplified
    # form avoids subtracting two numbers that agree to ~10 digits.
    k_minus_db = r.kappa_c / (4.0 * r.g ** 2 * n)
    ref = b_branch if masing else a_branch
    p_ref = wg * (a_branch - ref)          # pump-balance excess at the reference
    kd_ref = k_minus_db if masing else k_minus_db + d * (b_branch - a_branch)

    source = 1.0 + 2.0 * r.n_th
    c2 = wg * d
    c1 = -(p_ref * d + wg * kd_ref + source)
    c0 = p_ref * kd_ref - n - source * ref

    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < 0.0:
        if disc > -1e-9 * c1 * c1:
            disc = 0.0
        else:
            raise NoRealRootError("closure quadratic has no real root")
    sq = math.sqrt(disc)
    # stable quadratic roots; the physical branch is the smaller S_z root,
    # i.e. the smaller signed shift
    q = -0.5 * (c1 + math.copysign(sq, c1))
    if q == 0.0:
        delta = 0.0
    else:
        delta = min(q / c2, c0 / q)
    # one Newton step in the shifted variable to polish
    f = (c2 * delta + c1) * delta + c0
    df = 2.0 * c2 * delta + c1
    if df != 0.0:
        delta -= f / df

    s_z = ref + delta
    p = p_ref - wg * delta                 # P = (w-g)N - (w+g)S_z, cancellation-free
    c_coll = s_z * p / (2.0 * r.kappa_s)
    n_c = r.n_th + p / (2.0 * r.kappa_c)
    if n_c < 0.0:
        raise NumericalError(f"closure produced negative photon number n_c={n_c:.3e}")
    n_e = (n + s_z) / 2.0
    n_g = (n - s_z) / 2.0
    spin_corr = n_e + c_coll               # single-spin floor plus collective part
    n_s = spin_corr / s_z if s_z > 0.0 else math.nan
    return CorrelationState(
        masing=masing,
        s_z=s_z,
        spin_corr=spin_corr,
        c_coll=c_coll,
        n_c=n_c,
        n_s=n_s,
        n_e=n_e,
        n_g=n_g,
        flux=r.kappa_c * (n_c - r.n_th),
        p_out=HBAR * r.omega_c * r.kappa_ex * n_c,
    )


def closure_residuals(state: CorrelationState, r: DerivedRates) -> dict[str, float]:
    """Stationarity residuals of the four closed moment equations.

    The cross-correlation rate j = -kappa_c*(n_c - n_th) eliminates the cavity
    coupling from the other balances. Each residual is normalised by the
    largest absolute term entering that balance, so values near machine
    epsilon mean the equation is satisfied to full precision.
    """
    n = r.n_spins
    j = -state.flux
    gamma_coop = 4.0 * r.g ** 2 / (r.kappa_s + r.kappa_c)

    def norm(res: float, *terms: float) -> float:
        scale = max((abs(t) for t in terms), default=0.0)
        return res / scale if scale > 0.0 else 0.0

    # population balance: pump in, decay out, exchange with the cavity
    t1, t2 = r.w * state.n_g, r.gamma_eg * state.n_e
    res_pop = norm(t1 - t2 + j, t1, t2, j)

    # cross-correlation balance fixing j against the stored moments
    m1 = gamma_coop * (1.0 - 1.0 / n) * state.c_coll
    m2 = gamma_coop * state.n_e
    m3 = gamma_coop * state.n_c * state.s_z
    res_cross = norm(j + m1 + m2 + m3, j, m1, m2, m3)

    # collective coherence balance
    t1, t2 = r.kappa_s * state.c_coll, state.s_z * j
    res_coh = norm(t1 + t2, t1, t2)

    # photon balance against the thermal bath
    t1, t2 = r.kappa_c * state.n_c, r.kappa_c * r.n_th
    res_ph = norm(t1 - t2 + j, t1, t2, j)

    return {"population": res_pop, "cross": res_cross,
            "coherence": res_coh, "photon": res_ph}


def max_closure_residual(state: CorrelationState, r: DerivedRates) -> float:
    return max(abs(v) for v in closure_residuals(state, r).values())


def masing_pump_window(p: SystemParams) -> tuple[float, float]:
    """Pump-rate interval (w_lo, w_hi) where the system mases, other knobs fixed.

    The threshold gap A(w) - B(w) is unimodal in w with an interior maximum at
    w* = sqrt(8 gamma_eg N g^2 / (q kappa_c)) - gamma_eg, so both edges come
    from bisection against the closed-form maximiser. Raises NotMasingError if
    the gap never turns positive.
    """
    r0 = derive_rates(p)
    if abs(meanfield.drag_detuning(r0)) > _RESONANCE_TOL:
        raise RegimeError("masing window assumes a resonant transition")

    def gap(w: float) -> float:
        r = derive_rates(replace(p, w=w))
        return meanfield.dark_inversion(r) - meanfield.clamped_inversion(r)

    n = r0.n_spins
    w_star = math.sqrt(8.0 * r0.gamma_eg * n * r0.g ** 2 / (r0.q * r0.kappa_c)) \
        - r0.gamma_eg
    if w_star <= r0.gamma_eg or gap(w_star) <= 0.0:
        raise NotMasingError("no pump rate mases at these parameters")

    def bisect(lo: float, hi: float, want_positive_at_hi: bool) -> float:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if (gap(mid) > 0.0) == want_positive_at_hi:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-13 * max(abs(lo), abs(hi)):
                break
        return 0.5 * (lo + hi)

    w_lo = bisect(r0.gamma_eg * (1.0 + 1e-12), w_star, True)
    hi_bracket = w_star
    while gap(hi_bracket) > 0.0:
        hi_bracket *= 4.0
        if hi_bracket > 1e30:
            raise NumericalError("failed to bracket the upper masing edge")
    w_hi = bisect(w_star, hi_bracket, False)
    return w_lo, w_hi


def optimal_pump_for_correlation(p: SystemParams) -> tuple[float, float]:
    """Pump maximising the collective spin correlation, with the value there.

    w_opt = (2 N g^2 / kappa_c - 1/T2*) / q and
    corr_max = N^2/(8 q) * (1 - kappa_c/(2 N g^2 T2*))^2.
    Requires the masing window to exist and contain w_opt.
    """
    r0 = derive_rates(p)
    _check_resonant(r0)
    n = r0.n_spins
    w_opt = (2.0 * n * r0.g ** 2 / r0.kappa_c - 1.0 / p.t2_star) / p.q
    if w_opt <= 0.0:
        raise NotMasingError("correlation optimum lies at non-positive pump")
    corr_max = n * n / (8.0 * p.q) \
        * (1.0 - r0.kappa_c / (2.0 * n * r0.g ** 2 * p.t2_star)) ** 2
    return w_opt, corr_max
