"""Exception hierarchy.

Configuration problems derive from :class:`ConfigError` (a ``ValueError``);
numerical failures derive from :class:`NumericalError` (a ``RuntimeError``).
The CLI maps the first family to exit code 2 and the second to exit code 3.
"""


class ThermalRepellerError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(ThermalRepellerError, ValueError):
    """Invalid parameters, flags or option combinations."""


class UnsupportedError(ConfigError):
    """A valid-looking request that the chosen model cannot serve."""


class DomainError(ThermalRepellerError, ValueError):
    """Argument outside the domain of a numerical kernel."""


class NumericalError(ThermalRepellerError, RuntimeError):
    """Base class for failures of a numerical procedure."""


class ConvergenceError(NumericalError):
    """An iterative or tail-extended procedure did not converge.

    Attributes
    ----------
    partial : float or None
        Best value available when the procedure gave up.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class IntegrationError(NumericalError):
    """ODE integration failed (step-size underflow, non-finite state)."""

    def __init__(self, message, t_fail=None):
        super().__init__(message)
        self.t_fail = t_fail


class BracketingError(NumericalError):
    """Root finding was given a bracket without a sign change."""


class DegenerateError(NumericalError):
    """The requested quantity is undefined for these parameters.

    Raised for vanishing detector flux, transmission probabilities of
    exactly 0 or 1 where a critical trajectory is needed, and similar cases.
    """


class EmptyEnsembleError(DegenerateError):
    """Velocity truncation removed every node of a thermal ensemble."""


class UndecidedError(NumericalError):
    """A trajectory could not be classified within the time horizon."""
