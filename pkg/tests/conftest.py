"""Shared fixtures: the reference operating point and its derived rates."""

from __future__ import annotations

import pytest

from maserlab.params import SystemParams, DerivedRates, derive_rates

# Reference operating point: 3 GHz cavity with Q = 1e5, NV-doped diamond at
# room temperature, pump rate 1e5 1/s. The coupling is pinned to 0.02 Hz so
# that frozen oracle values below do not move with the geometric estimate.
P0 = dict(nu_c=3.0e9, Q=1.0e5, v_eff=2.0e-6, rho_nv=1.0e23, v_nv=4.5e-9,
          t2_star=0.5e-6, gamma_eg=200.0, w=1.0e5, t=300.0, l=0.05,
          g_hz=0.02)


def make_params(**overrides) -> SystemParams:
    return SystemParams(**{**P0, **overrides})


def make_rates(**overrides) -> DerivedRates:
    return derive_rates(make_params(**overrides))


@pytest.fixture
def p0() -> SystemParams:
    return make_params()


@pytest.fixture
def r0() -> DerivedRates:
    return make_rates()
