"""Request and response bodies for the HTTP service.

Field names carry unit suffixes and match the config-file keys, so a config
mapping can be posted as-is. NaN never crosses the wire: undefined numbers
serialize as null.
"""

from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field

from ..config import params_from_mapping
from ..params import SystemParams


def none_if_nan(value: float) -> float | None:
    return None if value is None or math.isnan(value) else float(value)


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ParamsPayload(StrictModel):
    nu_c_hz: float
    q_factor: float
    v_eff_m3: float
    rho_nv_per_m3: float
    v_nv_m3: float
    t2_star_s: float
    gamma_eg_per_s: float
    w_per_s: float
    t_k: float
    l_m: float
    q_pump: float = 16.0
    b_gauss: float | None = None
    gamma_nv_hz_per_gauss: float = 2.8e6
    d_zfs_hz: float = 2.87e9
    orientation_divisor: float = 12.0
    kappa_ex_fraction: float = 1.0
    g_hz: float | None = None

    def to_params(self) -> SystemParams:
        return params_from_mapping(self.model_dump(exclude_none=True))


class ParamsRequest(StrictModel):
    params: ParamsPayload


class TransitionRequest(StrictModel):
    params: ParamsPayload
    b_gauss: float = Field(ge=0.0)


class OmegaGrid(StrictModel):
    """Log-spaced analysis-frequency grid, in units of the hybrid decay rate."""
    minimum: float = Field(default=1e-6, gt=0.0)
    maximum: float = Field(default=1e1, gt=0.0)
    points: int = Field(default=200, ge=2, le=20000)


class LinewidthRequest(StrictModel):
    params: ParamsPayload
    spectrum: bool = False
    omega_grid: OmegaGrid = OmegaGrid()


class SensitivityNoiseRequest(StrictModel):
    params: ParamsPayload
    mode: str = "magnetic"
    injected: float | None = None
    omega_grid: OmegaGrid = OmegaGrid()


class AmplifierRequest(StrictModel):
    params: ParamsPayload
    p_in_w: float = Field(gt=0.0)
    omega_in_hz: float | None = Field(default=None, gt=0.0)


class DynamicsRequest(StrictModel):
    params: ParamsPayload
    t_end_s: float | None = Field(default=None, gt=0.0)
    seed: int | None = 0
    p_in_w: float = Field(default=0.0, ge=0.0)
    omega_in_hz: float | None = Field(default=None, gt=0.0)
    max_samples: int = Field(default=500, ge=2, le=20000)


class AxisPayload(StrictModel):
    name: str
    min: float
    max: float
    points: int = Field(ge=1)
    scale: str = "log"


class SweepRequest(StrictModel):
    params: ParamsPayload
    x: AxisPayload
    y: AxisPayload
    quantities: list[str]
    p_in_w: float = Field(default=0.0, ge=0.0)


class HealthResponse(StrictModel):
    status: str
    version: str


class RatesResponse(StrictModel):
    omega_c_rad_per_s: float
    omega_s_rad_per_s: float
    g_rad_per_s: float
    n_spins: float
    kappa_c_per_s: float
    kappa_ex_per_s: float
    kappa_s_per_s: float
    n_th: float
    gamma_nv_rad_per_s_t: float
    resonant: bool


class TransitionResponse(StrictModel):
    frequency_hz: float
    inverted: bool


class SteadyStateResponse(StrictModel):
    regime: str
    s_z: float
    n_c: float
    n_s: float
    n_e: float
    n_g: float
    a_re: float
    a_im: float
    s_minus_re: float
    s_minus_im: float
    omega_rad_per_s: float
    delta_cs: float
    p_out_w: float


class ThresholdResponse(StrictModel):
    kappa_c_threshold_per_s: float
    q_threshold: float | None
    w_max_per_s: float
    masing: bool


class CorrelationsResponse(StrictModel):
    masing: bool
    s_z: float
    spin_corr: float
    c_coll: float
    n_c: float
    n_s: float | None
    n_e: float
    n_g: float
    flux_per_s: float
    p_out_w: float
    residual_max: float


class OptimalPumpResponse(StrictModel):
    w_opt_per_s: float
    corr_max: float


class SpectrumPayload(StrictModel):
    omega_rad_per_s: list[float]
    total: list[float]
    spin_term: list[float]
    cavity_term: list[float]


class LinewidthResponse(StrictModel):
    gamma_st_per_s: float
    fwhm_hz: float
    t_coh_s: float
    n_incoh: float
    n_c: float
    n_s: float
    spectrum: SpectrumPayload | None = None


class OptimalCoherenceResponse(StrictModel):
    w_analytic_per_s: float
    t_coh_analytic_s: float
    w_numeric_per_s: float
    t_coh_numeric_s: float


class SensitivityResponse(StrictModel):
    delta_b_t_per_sqrt_hz: float
    omega_max_b_rad_per_s: float
    delta_x_m_per_sqrt_hz: float
    omega_max_x_rad_per_s: float
    gamma_st_per_s: float


class OutputNoiseResponse(StrictModel):
    mode: str
    injected: float
    omega_rad_per_s: list[float]
    total: list[float]
    shot: list[float]
    background: list[float]
    signal: list[float]


class AmplifierBranchPayload(StrictModel):
    s_z: float
    x: float
    gain: float
    gain_db: float
    p_out_w: float
    t_n_k: float | None
    stable: bool
    max_re_eig: float
    a_re: float
    a_im: float
    s_out_re: float
    s_out_im: float


class AmplifierResponse(StrictModel):
    regime: str
    omega_in_rad_per_s: float
    s_in_flux: float
    stable_index: int
    branches: list[AmplifierBranchPayload]


class RegimeResponse(StrictModel):
    regime: str
    w_max_per_s: float
    kappa_c_threshold_per_s: float | None
    q_threshold: float | None


class DynamicsResponse(StrictModel):
    converged: bool
    residual: float
    frame_rad_per_s: float
    t_s: list[float]
    n_e: list[float]
    n_g: list[float]
    s_re: list[float]
    s_im: list[float]
    a_re: list[float]
    a_im: list[float]


class SweepResponse(StrictModel):
    metadata: dict
    x: list[float]
    y: list[float]
    data: dict[str, list[list[float | None]]]
    regime: list[list[str]] | None = None
    threshold_curve: list[list[float]] | None = None
    w_opt_curve: list[list[float]] | None = None
