"""Exception hierarchy shared by every heatsharp module."""


class HeatSharpError(Exception):
    """Base class for all library errors."""


class DomainError(HeatSharpError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidTriple(DomainError):
    """No exponent r in [1, inf] satisfies 1/p + 1/q = 1 + 1/r."""


class DivergentConvolution(DomainError):
    """Two Gaussian profiles whose product is not integrable."""


class NonNormable(DomainError):
    """A growing (negative-width) Gaussian has no finite L^p norm."""


class LimitOnlyExtremizer(DomainError):
    """The extremal exponent is 0 or infinity; equality holds only in a limit."""


class TruncationWarning(UserWarning):
    """The heat kernel radius exceeds the half-width of the sampling grid."""
