"""Exception hierarchy shared by the library and the CLI."""


class EinsteinRabiError(Exception):
    """Base class for all package errors."""


class DomainError(EinsteinRabiError, ValueError):
    """An argument lies outside the domain of the requested function."""


class NumericalError(EinsteinRabiError, RuntimeError):
    """A quadrature, root find or integrator failed to reach its tolerance."""


class ConfigError(EinsteinRabiError, ValueError):
    """A run configuration failed schema validation."""


class TraceFormatError(EinsteinRabiError, ValueError):
    """A trace CSV file could not be parsed or validated."""


class FitError(EinsteinRabiError, RuntimeError):
    """The forward model failed inside the declared parameter bounds."""
