"""Time-domain integration of the first-order equations of motion.

State vector y = (N_e, N_g, Re S_-, Im S_-, Re a, Im a) in a frame rotating
at a chosen reference frequency. Without an injected tone the natural frame
is the dragged oscillation frequency, so masing fixed points are stationary;
with a drive the frame follows the input tone and the drive enters the cavity
equation as a constant term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .constants import HBAR
from .errors import IntegrationError, NotAFixedPointError
from .params import DerivedRates
from . import meanfield

CONVERGENCE_TOL = 1e-8
FIXED_POINT_TOL = 1e-6
ZERO_MODE_TOL = 1e-6      # |Re lambda| below this multiple of kappa_c is neutral


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: np.ndarray   # complex, sorted by real part descending
    stable: bool              # all decaying apart from an excluded phase mode
    excluded_mode: int | None  # index of the neutral phase mode, if any
    residual: float           # strict fixed-point residual of the probed state


@dataclass(frozen=True)
class Trace:
    t: np.ndarray             # sample times, s
    y: np.ndarray             # states, shape (len(t), 6)
    frame: float              # rotating-frame frequency, rad/s
    converged: bool           # residual dropped below CONVERGENCE_TOL
    residual: float           # scale-normalised residual at the final sample

    @property
    def n_e(self) -> np.ndarray:
        return self.y[:, 0]

    @property
    def n_g(self) -> np.ndarray:
        return self.y[:, 1]

    @property
    def s_minus(self) -> np.ndarray:
        return self.y[:, 2] + 1j * self.y[:, 3]

    @property
    def a(self) -> np.ndarray:
        return self.y[:, 4] + 1j * self.y[:, 5]

    @property
    def final(self) -> np.ndarray:
        return self.y[-1]

    def to_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# columns=t_s,n_e,n_g,re_s,im_s,re_a,im_a\n")
            fh.write(f"# frame_rad_per_s={self.frame:.17g}\n")
            fh.write(f"# converged={str(self.converged).lower()}\n")
            for ti, row in zip(self.t, self.y):
                cells = ",".join(f"{v:.17g}" for v in row)
                fh.write(f"{ti:.17g},{cells}\n")


def drive_amplitude(r: DerivedRates, p_in_w: float, omega_in: float) -> float:
    """Input flux amplitude sqrt(P_in / (hbar omega_in)), taken real positive."""
    if p_in_w < 0.0:
        raise ValueError("drive power must be non-negative")
    return math.sqrt(p_in_w / (HBAR * omega_in))


def default_frame(r: DerivedRates, omega_in: float | None = None) -> float:
    return omega_in if omega_in is not None else meanfield.dragged_frequency(r)


def drift(r: DerivedRates, y: np.ndarray, s_in: complex = 0.0,
          omega_frame: float | None = None) -> np.ndarray:
    """Right-hand side of the six real equations of motion."""
    frame = default_frame(r) if omega_frame is None else omega_frame
    d_s = frame - r.omega_s
    d_c = frame - r.omega_c
    n_e, n_g, sr, si, ar, ai = y
    s_z = n_e - n_g
    flux = 2.0 * r.g * (ar * si - ai * sr)
    root_ex = math.sqrt(r.kappa_ex)
    return np.array([
        r.w * n_g - r.gamma_eg * n_e - flux,
        -r.w * n_g + r.gamma_eg * n_e + flux,
        -0.5 * r.kappa_s * sr - r.g * s_z * ai - d_s * si,
        -0.5 * r.kappa_s * si + r.g * s_z * ar + d_s * sr,
        -0.5 * r.kappa_c * ar + r.g * si - d_c * ai + root_ex * s_in.real,
        -0.5 * r.kappa_c * ai - r.g * sr + d_c * ar + root_ex * s_in.imag,
    ])


def jacobian(r: DerivedRates, y: np.ndarray,
             omega_frame: float | None = None) -> np.ndarray:
    """Exact Jacobian of drift with respect to the six state components."""
    frame = default_frame(r) if omega_frame is None else omega_frame
    d_s = frame - r.omega_s
    d_c = frame - r.omega_c
    n_e, n_g, sr, si, ar, ai = y
    s_z = n_e - n_g
    g = r.g
    row1 = [-r.gamma_eg, r.w, 2.0 * g * ai, -2.0 * g * ar,
            -2.0 * g * si, 2.0 * g * sr]
    return np.array([
        row1,
        [-v for v in row1],
        [-g * ai, g * ai, -0.5 * r.kappa_s, -d_s, 0.0, -g * s_z],
        [g * ar, -g * ar, d_s, -0.5 * r.kappa_s, g * s_z, 0.0],
        [0.0, 0.0, 0.0, g, -0.5 * r.kappa_c, -d_c],
        [0.0, 0.0, -g, 0.0, d_c, -0.5 * r.kappa_c],
    ])


def steady_residual(r: DerivedRates, y: np.ndarray, s_in: complex = 0.0,
                    omega_frame: float | None = None) -> float:
    """Strict fixed-point residual: per equation, |f| over the largest term.

    Each equation's denominator is floored at its characteristic scale, so a
    quadrature whose terms all vanish at the fixed point reports its rounding
    crumbs against the system scale instead of against themselves.
    """
    frame = default_frame(r) if omega_frame is None else omega_frame
    d_s = frame - r.omega_s
    d_c = frame - r.omega_c
    n_e, n_g, sr, si, ar, ai = y
    s_z = n_e - n_g
    flux = 2.0 * r.g * (ar * si - ai * sr)
    root_ex = math.sqrt(r.kappa_ex)
    groups = [
        (r.w * n_g, -r.gamma_eg * n_e, -flux),
        (-r.w * n_g, r.gamma_eg * n_e, flux),
        (-0.5 * r.kappa_s * sr, -r.g * s_z * ai, -d_s * si),
        (-0.5 * r.kappa_s * si, r.g * s_z * ar, d_s * sr),
        (-0.5 * r.kappa_c * ar, r.g * si, -d_c * ai, root_ex * s_in.real),
        (-0.5 * r.kappa_c * ai, -r.g * sr, d_c * ar, root_ex * s_in.imag),
    ]
    char, rate = _characteristic_scales(r)
    worst = 0.0
    for floor, terms in zip(rate * char, groups):
        scale = max(floor, max(abs(t) for t in terms))
        worst = max(worst, abs(math.fsum(terms)) / scale)
    return worst


def _characteristic_scales(r: DerivedRates) -> tuple[np.ndarray, float]:
    n = r.n_spins
    a_scale = max(1.0, math.sqrt(n * (r.w + r.gamma_eg) / (2.0 * r.kappa_c)))
    char = np.array([n, n, 0.5 * n, 0.5 * n, a_scale, a_scale])
    rate = max(r.kappa_c, r.kappa_s, r.w, r.gamma_eg)
    return char, rate


def scaled_residual(r: DerivedRates, y: np.ndarray, s_in: complex = 0.0,
                    omega_frame: float | None = None) -> float:
    """Residual against fixed system scales; used for convergence detection.

    Unlike steady_residual this does not blow up while a transient decays
    towards a dark state, because the denominator never shrinks with y.
    """
    char, rate = _characteristic_scales(r)
    f = drift(r, y, s_in, omega_frame)
    return float(np.max(np.abs(f) / (rate * char)))


def seeded_initial_state(r: DerivedRates, seed: int | None = 0) -> np.ndarray:
    """Dark-state populations with a symmetry-breaking spin seed |S_-| = sqrt(N).

    The seed phase is drawn from the given RNG seed, so runs are repeatable by
    default and only become stochastic when seed is None.
    """
    rng = np.random.default_rng(seed)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    n = r.n_spins
    root = math.sqrt(n)
    return np.array([
        n * r.w / (r.w + r.gamma_eg),
        n * r.gamma_eg / (r.w + r.gamma_eg),
        root * math.cos(phase),
        root * math.sin(phase),
        0.0,
        0.0,
    ])


def integrate(r: DerivedRates,
              t_end: float | None = None,
              y0: np.ndarray | None = None,
              s_in: complex = 0.0,
              omega_frame: float | None = None,
              seed: int | None = 0,
              rtol: float = 1e-10,
              chunks: int = 8,
              max_samples: int = 2000) -> Trace:
    """Integrate the equations of motion until convergence or t_end.

    The span is covered in chunks; integration stops early once both the
    scale-normalised residual is below CONVERGENCE_TOL and the state moved by
    less than 1e-9 of its characteristic scale over the last chunk. The
    two-part test avoids false positives while a transient passes near the
    unstable dark state, where the residual alone can dip transiently. Uses
    LSODA with the analytic Jacobian; the equations are stiff whenever
    kappa_s far exceeds kappa_c.
    """
    frame = default_frame(r) if omega_frame is None else omega_frame
    if y0 is None:
        y0 = seeded_initial_state(r, seed)
    y0 = np.asarray(y0, dtype=float)
    if y0.shape != (6,):
        raise ValueError("initial state must have six components")
    if t_end is None:
        slow = max(1.0 / r.kappa_c, 1.0 / r.kappa_s,
                   1.0 / r.gamma_eg, 1.0 / max(r.w, 1e-300))
        t_end = 50.0 * slow
    if scaled_residual(r, y0, s_in, frame) <= CONVERGENCE_TOL:
        t = np.array([0.0])
        y = y0[np.newaxis, :]
        return Trace(t=t, y=y, frame=frame, converged=True,
                     residual=scaled_residual(r, y0, s_in, frame))

    char, _ = _characteristic_scales(r)
    atol = rtol * 1e-3 * char  # per-component absolute floor

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return drift(r, y, s_in, frame)

    def jac(t: float, y: np.ndarray) -> np.ndarray:
        return jacobian(r, y, frame)

    edges = np.linspace(0.0, t_end, chunks + 1)
    ts = [np.array([0.0])]
    ys = [y0[np.newaxis, :]]
    current = y0
    converged = False
    for lo, hi in zip(edges[:-1], edges[1:]):
        sol = solve_ivp(rhs, (lo, hi), current, method="LSODA", jac=jac,
                        rtol=rtol, atol=atol, dense_output=False)
        if not sol.success:
            raise IntegrationError(f"integration failed: {sol.message}")
        ts.append(sol.t[1:])
        ys.append(sol.y.T[1:])
        previous, current = current, sol.y.T[-1]
        moved = float(np.max(np.abs(current - previous) / char))
        if moved <= 1e-9 and \
                scaled_residual(r, current, s_in, frame) <= CONVERGENCE_TOL:
            converged = True
            break
    t = np.concatenate(ts)
    y = np.concatenate(ys)
    if t.size > max_samples:
        idx = np.unique(np.linspace(0, t.size - 1, max_samples).astype(int))
        t = t[idx]
        y = y[idx]
    final_residual = scaled_residual(r, current, s_in, frame)
    return Trace(t=t, y=y, frame=frame,
                 converged=converged or final_residual <= CONVERGENCE_TOL,
                 residual=final_residual)


def reduced_jacobian(r: DerivedRates, y: np.ndarray,
                     omega_frame: float | None = None) -> np.ndarray:
    """Jacobian on the invariant manifold N_e + N_g = const.

    The six equations conserve the total population exactly, which pins one
    Jacobian eigenvalue at zero for every fixed point. Working in the reduced
    variables (S_z, Re S_-, Im S_-, Re a, Im a) removes that spurious neutral
    direction, so the remaining spectrum reflects genuine dynamics only.
    """
    frame = default_frame(r) if omega_frame is None else omega_frame
    d_s = frame - r.omega_s
    d_c = frame - r.omega_c
    _, _, sr, si, ar, ai = y
    s_z = y[0] - y[1]
    g = r.g
    return np.array([
        [-(r.w + r.gamma_eg), 4.0 * g * ai, -4.0 * g * ar,
         -4.0 * g * si, 4.0 * g * sr],
        [-g * ai, -0.5 * r.kappa_s, -d_s, 0.0, -g * s_z],
        [g * ar, d_s, -0.5 * r.kappa_s, g * s_z, 0.0],
        [0.0, 0.0, g, -0.5 * r.kappa_c, -d_c],
        [0.0, -g, 0.0, d_c, -0.5 * r.kappa_c],
    ])


def jacobian_stability(r: DerivedRates, y: np.ndarray, s_in: complex = 0.0,
                       omega_frame: float | None = None,
                       exclude_phase_mode: bool | None = None
                       ) -> StabilityReport:
    """Linear stability of a fixed point of the equations of motion.

    Eigenvalues come from the reduced five-dimensional Jacobian (total
    population is conserved and carries no dynamics). Free-running
    oscillating states additionally hold a neutral global-phase mode; it is
    identified by overlap with the phase tangent (0, -Im S_-, Re S_-, -Im a,
    Re a) and excluded from the verdict. Driven states are phase-locked and
    keep all five modes. Raises NotAFixedPointError when the supplied state
    does not satisfy the stationarity conditions.
    """
    frame = default_frame(r) if omega_frame is None else omega_frame
    y = np.asarray(y, dtype=float)
    residual = steady_residual(r, y, s_in, frame)
    if residual > FIXED_POINT_TOL:
        raise NotAFixedPointError(
            f"state is not stationary: residual {residual:.3e} > {FIXED_POINT_TOL}")
    if exclude_phase_mode is None:
        exclude_phase_mode = (s_in == 0.0) and bool(np.any(y[2:] != 0.0))

    eigvals, eigvecs = np.linalg.eig(reduced_jacobian(r, y, frame))
    order = np.argsort(-eigvals.real)
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    excluded = None
    if exclude_phase_mode:
        tangent = np.array([0.0, -y[3], y[2], -y[5], y[4]])
        norm = np.linalg.norm(tangent)
        if norm > 0.0:
            tangent = tangent / norm
            near_zero = np.flatnonzero(
                np.abs(eigvals.real) <= ZERO_MODE_TOL * r.kappa_c)
            best, best_overlap = None, 0.0
            for idx in near_zero:
                vec = eigvecs[:, idx]
                overlap = abs(np.vdot(tangent, vec)) / np.linalg.norm(vec)
                if overlap > best_overlap:
                    best, best_overlap = int(idx), overlap
            excluded = best
    rest = [ev for i, ev in enumerate(eigvals) if i != excluded]
    stable = all(ev.real < 0.0 for ev in rest)
    return StabilityReport(eigenvalues=eigvals, stable=stable,
                           excluded_mode=excluded, residual=residual)
