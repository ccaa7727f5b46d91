"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A parameter is outside its documented range or has the wrong shape."""


class DomainError(ValueError):
    """A frequency or argument lies outside the valid domain."""


class ShapeMismatchError(ValueError):
    """Array arguments have incompatible lengths."""


class ModelError(ValueError):
    """A process model is invalid, e.g. unstable autoregressive coefficients."""


class EdgeFrequencyError(ValueError):
    """Operation is not defined at frequency zero or the Nyquist frequency."""


class DegenerateSpectrumError(ValueError):
    """The spectral density vanishes where a positive value is required."""


class NumericalError(RuntimeError):
    """A numerical procedure failed, e.g. a covariance factorization."""
