"""Exception types raised across the package."""


class SMRAError(Exception):
    """Base class for every error raised by :mod:`smra_rd`."""


class InvalidParameter(SMRAError, ValueError):
    """A model or operating-point parameter is out of its admissible range."""


class NotPositiveDefinite(SMRAError, ValueError):
    """A covariance matrix failed the positive-definiteness check."""


class DimensionMismatch(SMRAError, ValueError):
    """Spectra or matrices that must share a dimension do not."""


class Unsupported(SMRAError, NotImplementedError):
    pass


class QuadratureFailure(SMRAError, RuntimeError):
    pass


class TargetUnreachable(SMRAError, ValueError):
    """The requested distortion exceeds the largest achievable at this noise level."""


class SingularSystem(SMRAError, RuntimeError):
    pass


class InvalidSampleCount(SMRAError, ValueError):
    pass


class UnknownPredecessor(SMRAError, KeyError):
    pass


class ConfigError(SMRAError, ValueError):
    """An experiment configuration could not be parsed into a valid network."""
