"""Exception and warning types shared across the toolkit."""


class SplitkitError(Exception):
    """Base class for all toolkit errors."""


class SchemeParseError(SplitkitError):
    """A scheme document is malformed or contains invalid values."""


class PreconditionViolated(SplitkitError):
    """An operation was called on a scheme that fails its preconditions."""


class DegenerateG(SplitkitError):
    """The quadratic form degenerates (g = 0, i.e. the cubic drift sum is 1)."""


class NegativeG(SplitkitError):
    """A negative g was passed where the quadratic form needs g > 0."""


class SingularAlpha(SplitkitError):
    """The closed-form denominator of the zero-cubic-sum family vanishes."""


class UnsupportedN(SplitkitError):
    """No construction is available for the requested number of factors."""


class RadicandNegative(SplitkitError):
    """The kick cubic sum is >= 1, leaving no real square root."""


class IrrationalCoefficient(SplitkitError):
    """A coefficient cannot be represented exactly in rational arithmetic."""


class BoundViolation(SplitkitError):
    """A bound that must hold for the given scheme is violated."""


class NonFinite(SplitkitError):
    """A trajectory left the range of finite floating-point numbers."""

    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index


class NotSymmetric(UserWarning):
    """A construction expected a left-right symmetric coefficient set."""
