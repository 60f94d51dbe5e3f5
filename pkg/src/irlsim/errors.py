"""Exception types shared across the package."""


class IrlsimError(Exception):
    """Base class for all library errors."""


class ConfigurationError(IrlsimError):
    """Bad shapes, unknown identifiers, invalid config values."""


class NumericalError(IrlsimError):
    """Non-finite values where finite ones are required."""


class FormatError(IrlsimError):
    """Malformed dataset / checkpoint / report files."""


class TapeError(IrlsimError):
    """Gradient tape misuse (no recorded forward, double backward, ...)."""
