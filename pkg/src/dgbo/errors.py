"""Exception hierarchy shared by all dgbo modules."""


class DgboError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(DgboError):
    """Invalid configuration: grid mismatch, bad parameter, malformed config text."""


class NumericError(DgboError):
    """Non-finite value encountered where a finite one is required."""


class DomainError(DgboError):
    """Input outside the mathematical domain of an operation."""


class ResourceError(DgboError):
    """A scan or grid request exceeds the configured capacity or budget."""


class AdmissibilityError(DgboError):
    """A dispersion relation fails a structural requirement (e.g. oddness)."""


class BlowUpError(DgboError):
    """Numerical blow-up during time integration.

    Carries the last finite diagnostics so a partial run can still be reported.
    """

    def __init__(self, message, time=None, last_diagnostics=None):
        super().__init__(message)
        self.time = time
        self.last_diagnostics = last_diagnostics
