"""Exception hierarchy.

Config/validation problems and numerical failures are kept distinct so the
service and the CLI can map them to different status codes.
"""


class MaserlabError(Exception):
    """Base class for all package errors."""


class ParameterError(MaserlabError, ValueError):
    """A parameter value or combination is invalid."""


class ConfigError(MaserlabError, ValueError):
    """A config file is malformed, incomplete, or has unknown keys."""


class NumericalError(MaserlabError, RuntimeError):
    """A solver failed or a result left its validity domain."""


class NotMasingError(NumericalError):
    """The requested quantity is only defined above the masing threshold."""


class NoRealRootError(NumericalError):
    """A polynomial solve produced no acceptable real root."""


class AtThresholdError(NumericalError):
    """Gain (or a similar pole quantity) diverges at the masing threshold."""


class RegimeError(NumericalError):
    """Operation called outside the operating regime it is defined for."""


class ConvergenceError(NumericalError):
    """An iterative solver did not converge within its budget."""


class IntegrationError(NumericalError):
    """ODE integration failed (e.g. step-size underflow)."""


class NotAFixedPointError(NumericalError):
    """Stability analysis was asked about a state that is not stationary."""
