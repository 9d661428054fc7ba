"""Exception hierarchy shared by all modules."""


class SagnacError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(SagnacError, ValueError):
    pass


class NoSolitonError(InvalidParameterError):
    """Raised when the fiber cannot support a bright soliton (beta2 = 0 or gamma = 0)."""


class DivergenceError(InvalidParameterError):
    """Raised when the plateau phase pair diverges (balanced coupler)."""


class WindowingError(InvalidParameterError):
    pass


class UndefinedDirectionError(SagnacError, ValueError):
    """Raised when an amplitude direction is requested for a zero mean field."""


class InsufficientDataError(SagnacError, ValueError):
    pass


class CalibrationError(SagnacError, RuntimeError):
    pass


class NumericInstabilityError(SagnacError, ArithmeticError):
    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"non-finite field encountered at split-step {step}")


class ConfigError(SagnacError, ValueError):
    """Raised for malformed or out-of-bounds configuration input."""
