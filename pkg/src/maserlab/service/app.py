"""FastAPI application exposing the steady-state and sweep operations.

Error mapping: invalid parameters and config problems return 422; regime and
precondition failures (not masing, at threshold, not a fixed point) return
409; numerical failures (no real root, non-convergence) return 500.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from .. import amplifier
from .. import correlations
from .. import dynamics
from .. import linewidth
from .. import meanfield
from .. import sensitivity
from .. import sweeps
from ..errors import (
    AtThresholdError,
    ConfigError,
    MaserlabError,
    NotAFixedPointError,
    NotMasingError,
    NumericalError,
    ParameterError,
    RegimeError,
)
from ..params import derive_rates, transition_frequency
from . import schemas as sc

_PRECONDITION_ERRORS = (NotMasingError, RegimeError, AtThresholdError,
                        NotAFixedPointError)
_BAD_INPUT_ERRORS = (ParameterError, ConfigError)


def _status_for(exc: Exception) -> int:
    if isinstance(exc, _BAD_INPUT_ERRORS) or isinstance(exc, ValueError):
        return 422
    if isinstance(exc, _PRECONDITION_ERRORS):
        return 409
    return 500


def create_app() -> FastAPI:
    app = FastAPI(title="maserlab", version=__version__)

    @app.exception_handler(MaserlabError)
    async def _domain_error(request: Request, exc: MaserlabError) -> JSONResponse:
        return JSONResponse(status_code=_status_for(exc),
                            content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health", response_model=sc.HealthResponse)
    async def health() -> sc.HealthResponse:
        return sc.HealthResponse(status="ok", version=__version__)

    @app.post("/rates", response_model=sc.RatesResponse)
    async def rates(req: sc.ParamsRequest) -> sc.RatesResponse:
        r = derive_rates(req.params.to_params())
        return sc.RatesResponse(
            omega_c_rad_per_s=r.omega_c,
            omega_s_rad_per_s=r.omega_s,
            g_rad_per_s=r.g,
            n_spins=r.n_spins,
            kappa_c_per_s=r.kappa_c,
            kappa_ex_per_s=r.kappa_ex,
            kappa_s_per_s=r.kappa_s,
            n_th=r.n_th,
            gamma_nv_rad_per_s_t=r.gamma_nv,
            resonant=r.resonant,
        )

    @app.post("/transition-frequency", response_model=sc.TransitionResponse)
    async def transition(req: sc.TransitionRequest) -> sc.TransitionResponse:
        result = transition_frequency(req.b_gauss, req.params.to_params())
        return sc.TransitionResponse(frequency_hz=result.frequency_hz,
                                     inverted=result.inverted)

    @app.post("/steady-state", response_model=sc.SteadyStateResponse)
    async def steady_state(req: sc.ParamsRequest) -> sc.SteadyStateResponse:
        r = derive_rates(req.params.to_params())
        st = meanfield.steady_state(r)
        return sc.SteadyStateResponse(
            regime=st.regime,
            s_z=st.s_z,
            n_c=st.n_c,
            n_s=st.n_s,
            n_e=st.n_e,
            n_g=st.n_g,
            a_re=st.a.real,
            a_im=st.a.imag,
            s_minus_re=st.s_minus.real,
            s_minus_im=st.s_minus.imag,
            omega_rad_per_s=st.omega,
            delta_cs=st.delta_cs,
            p_out_w=st.p_out,
        )

    @app.post("/threshold", response_model=sc.ThresholdResponse)
    async def threshold(req: sc.ParamsRequest) -> sc.ThresholdResponse:
        r = derive_rates(req.params.to_params())
        kappa_th = meanfield.masing_threshold_kappa(r)
        return sc.ThresholdResponse(
            kappa_c_threshold_per_s=kappa_th,
            q_threshold=r.omega_c / kappa_th if kappa_th > 0.0 else None,
            w_max_per_s=meanfield.over_pump_limit(r),
            masing=meanfield.is_masing(r),
        )

    @app.post("/correlations", response_model=sc.CorrelationsResponse)
    async def correlation_state(req: sc.ParamsRequest) -> sc.CorrelationsResponse:
        r = derive_rates(req.params.to_params())
        st = correlations.steady_state(r)
        return sc.CorrelationsResponse(
            masing=st.masing,
            s_z=st.s_z,
            spin_corr=st.spin_corr,
            c_coll=st.c_coll,
            n_c=st.n_c,
            n_s=sc.none_if_nan(st.n_s),
            n_e=st.n_e,
            n_g=st.n_g,
            flux_per_s=st.flux,
            p_out_w=st.p_out,
            residual_max=correlations.max_closure_residual(st, r),
        )

    @app.post("/correlations/optimal-pump", response_model=sc.OptimalPumpResponse)
    async def optimal_pump(req: sc.ParamsRequest) -> sc.OptimalPumpResponse:
        w_opt, corr_max = correlations.optimal_pump_for_correlation(
            req.params.to_params())
        return sc.OptimalPumpResponse(w_opt_per_s=w_opt, corr_max=corr_max)

    @app.post("/linewidth", response_model=sc.LinewidthResponse)
    async def linewidth_endpoint(req: sc.LinewidthRequest) -> sc.LinewidthResponse:
        r = derive_rates(req.params.to_params())
        noise = linewidth.schawlow_townes(r)
        spectrum = None
        if req.spectrum:
            hybrid = 0.5 * (r.kappa_c + r.kappa_s)
            grid = np.logspace(math.log10(req.omega_grid.minimum * hybrid),
                               math.log10(req.omega_grid.maximum * hybrid),
                               req.omega_grid.points)
            sp = linewidth.phase_noise_spectrum(r, grid)
            spectrum = sc.SpectrumPayload(
                omega_rad_per_s=list(sp.omega),
                total=list(sp.total),
                spin_term=list(sp.spin_term),
                cavity_term=list(sp.cavity_term),
            )
        return sc.LinewidthResponse(
            gamma_st_per_s=noise.gamma_st,
            fwhm_hz=noise.fwhm_hz,
            t_coh_s=noise.t_coh,
            n_incoh=noise.n_incoh,
            n_c=noise.n_c,
            n_s=noise.n_s,
            spectrum=spectrum,
        )

    @app.post("/linewidth/optimal", response_model=sc.OptimalCoherenceResponse)
    async def optimal(req: sc.ParamsRequest) -> sc.OptimalCoherenceResponse:
        best = linewidth.optimal_coherence(req.params.to_params())
        return sc.OptimalCoherenceResponse(
            w_analytic_per_s=best.w_analytic,
            t_coh_analytic_s=best.t_coh_analytic,
            w_numeric_per_s=best.w_numeric,
            t_coh_numeric_s=best.t_coh_numeric,
        )

    @app.post("/sensitivity", response_model=sc.SensitivityResponse)
    async def sensitivity_endpoint(req: sc.ParamsRequest) -> sc.SensitivityResponse:
        r = derive_rates(req.params.to_params())
        s = sensitivity.sensitivities(r)
        return sc.SensitivityResponse(
            delta_b_t_per_sqrt_hz=s.delta_b,
            omega_max_b_rad_per_s=s.omega_max_b,
            delta_x_m_per_sqrt_hz=s.delta_x,
            omega_max_x_rad_per_s=s.omega_max_x,
            gamma_st_per_s=s.gamma_st,
        )

    @app.post("/sensitivity/output-noise", response_model=sc.OutputNoiseResponse)
    async def output_noise(req: sc.SensitivityNoiseRequest) -> sc.OutputNoiseResponse:
        r = derive_rates(req.params.to_params())
        hybrid = 0.5 * (r.kappa_c + r.kappa_s)
        grid = np.logspace(math.log10(req.omega_grid.minimum * hybrid),
                           math.log10(req.omega_grid.maximum * hybrid),
                           req.omega_grid.points)
        spectrum = sensitivity.output_noise_spectrum(
            r, mode=req.mode, omega=grid, injected=req.injected)
        return sc.OutputNoiseResponse(
            mode=spectrum.mode,
            injected=spectrum.injected,
            omega_rad_per_s=list(spectrum.omega),
            total=list(spectrum.total),
            shot=list(spectrum.shot),
            background=list(spectrum.background),
            signal=list(spectrum.signal),
        )

    @app.post("/amplifier", response_model=sc.AmplifierResponse)
    async def amplifier_endpoint(req: sc.AmplifierRequest) -> sc.AmplifierResponse:
        r = derive_rates(req.params.to_params())
        omega_in = 2.0 * math.pi * req.omega_in_hz if req.omega_in_hz else None
        result = amplifier.drive_steady_state(
            r, amplifier.DriveSpec(p_in_w=req.p_in_w, omega_in=omega_in))
        return sc.AmplifierResponse(
            regime=result.regime,
            omega_in_rad_per_s=result.omega_in,
            s_in_flux=result.s_in,
            stable_index=result.stable_index,
            branches=[
                sc.AmplifierBranchPayload(
                    s_z=br.s_z,
                    x=br.x,
                    gain=br.gain,
                    gain_db=br.gain_db,
                    p_out_w=br.p_out_w,
                    t_n_k=sc.none_if_nan(br.t_n_k),
                    stable=br.stable,
                    max_re_eig=br.max_re_eig,
                    a_re=br.a.real,
                    a_im=br.a.imag,
                    s_out_re=br.s_out.real,
                    s_out_im=br.s_out.imag,
                )
                for br in result.branches
            ],
        )

    @app.post("/amplifier/regime", response_model=sc.RegimeResponse)
    async def regime(req: sc.ParamsRequest) -> sc.RegimeResponse:
        r = derive_rates(req.params.to_params())
        kappa_th = meanfield.masing_threshold_kappa(r)
        q_th = r.omega_c / kappa_th if kappa_th > 0.0 else None
        return sc.RegimeResponse(
            regime=amplifier.classify_regime(r),
            w_max_per_s=meanfield.over_pump_limit(r),
            kappa_c_threshold_per_s=kappa_th,
            q_threshold=q_th,
        )

    @app.post("/dynamics", response_model=sc.DynamicsResponse)
    async def dynamics_endpoint(req: sc.DynamicsRequest) -> sc.DynamicsResponse:
        r = derive_rates(req.params.to_params())
        s_in = 0.0 + 0.0j
        frame = None
        if req.p_in_w > 0.0:
            omega_in = 2.0 * math.pi * req.omega_in_hz if req.omega_in_hz \
                else r.omega_c
            s_in = complex(dynamics.drive_amplitude(r, req.p_in_w, omega_in), 0.0)
            frame = omega_in
        trace = dynamics.integrate(r, t_end=req.t_end_s, s_in=s_in,
                                   omega_frame=frame, seed=req.seed,
                                   max_samples=req.max_samples)
        return sc.DynamicsResponse(
            converged=trace.converged,
            residual=trace.residual,
            frame_rad_per_s=trace.frame,
            t_s=list(trace.t),
            n_e=list(trace.n_e),
            n_g=list(trace.n_g),
            s_re=list(trace.y[:, 2]),
            s_im=list(trace.y[:, 3]),
            a_re=list(trace.y[:, 4]),
            a_im=list(trace.y[:, 5]),
        )

    @app.post("/sweep", response_model=sc.SweepResponse)
    async def sweep(req: sc.SweepRequest) -> sc.SweepResponse:
        spec = sweeps.GridSpec(
            base=req.params.to_params(),
            x=sweeps.Axis(req.x.name, req.x.min, req.x.max, req.x.points,
                          req.x.scale),
            y=sweeps.Axis(req.y.name, req.y.min, req.y.max, req.y.points,
                          req.y.scale),
            quantities=tuple(req.quantities),
            p_in_w=req.p_in_w,
        )
        grid = sweeps.run_sweep(spec)
        data = {q: [[sc.none_if_nan(float(v)) for v in row] for row in matrix]
                for q, matrix in grid.data.items()}
        return sc.SweepResponse(
            metadata=grid.metadata,
            x=[float(v) for v in grid.x_values],
            y=[float(v) for v in grid.y_values],
            data=data,
            regime=None if grid.regimes is None
            else [[str(v) for v in row] for row in grid.regimes],
            threshold_curve=None if grid.threshold_curve is None
            else [[float(a), float(b)] for a, b in grid.threshold_curve],
            w_opt_curve=None if grid.w_opt_curve is None
            else [[float(a), float(b)] for a, b in grid.w_opt_curve],
        )

    return app


app = create_app()
