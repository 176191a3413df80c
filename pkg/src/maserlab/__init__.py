"""Steady-state and dynamical modelling of a cavity-coupled spin ensemble.

The package derives working rates from lab-facing parameters, solves the
mean-field and second-order steady states, and builds the derived figures of
merit on top: emission linewidth and coherence time, magnetometry and
displacement sensitivity, and the driven amplifier response with noise
temperature. A sweep engine, an HTTP service and a command-line front end
expose the same operations for batch work.
"""

from .config import load_params, params_from_mapping
from .errors import (
    AtThresholdError,
    ConfigError,
    ConvergenceError,
    IntegrationError,
    MaserlabError,
    NoRealRootError,
    NotAFixedPointError,
    NotMasingError,
    NumericalError,
    ParameterError,
    RegimeError,
)
from .params import (
    DerivedRates,
    SystemParams,
    TransitionFrequency,
    coupling_from_geometry,
    derive_rates,
    thermal_occupation,
    transition_frequency,
)

__version__ = "0.1.0"

__all__ = [
    "AtThresholdError",
    "ConfigError",
    "ConvergenceError",
    "DerivedRates",
    "IntegrationError",
    "MaserlabError",
    "NoRealRootError",
    "NotAFixedPointError",
    "NotMasingError",
    "NumericalError",
    "ParameterError",
    "RegimeError",
    "SystemParams",
    "TransitionFrequency",
    "coupling_from_geometry",
    "derive_rates",
    "load_params",
    "params_from_mapping",
    "thermal_occupation",
    "transition_frequency",
    "__version__",
]
