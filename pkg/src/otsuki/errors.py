"""Exception hierarchy.

Two families: :class:`InputError` for arguments outside an operation's
domain (the CLI maps these to exit code 2) and :class:`NumericalError` for
failures of an algorithm on valid input (exit code 3).
"""


class OtsukiError(Exception):
    """Base class for every error raised by this package."""


class InputError(OtsukiError, ValueError):
    """An argument violates the documented domain of an operation."""


class InvalidDimension(InputError):
    pass


class DegenerateShape(InputError):
    """Modulus ``a`` is outside the open interval ``(0, a0(n))``."""


class InvalidRotation(InputError):
    """``(p, s)`` is not a coprime pair."""


class TargetOutOfRange(InputError):
    """Requested rotation angle ``2*pi*p/s`` lies outside ``(pi, sqrt(2)*pi)``."""


class InvalidArea(InputError):
    pass


class DimensionUnsupported(InputError):
    pass


class NoSignChange(InputError):
    """Endpoints of a bracket do not straddle a root."""


class DomainError(InputError):
    """A function was evaluated outside its domain."""


class NumericalError(OtsukiError, ArithmeticError):
    """A numerical method failed on otherwise valid input."""


class NonConvergence(NumericalError):
    pass


class NonFinite(NumericalError):
    pass


class DenominatorNonpositive(NumericalError):
    """The singular denominator is not positive inside its interval."""


class TurningPointStall(NumericalError):
    """The profile radius left the band between its turning points."""


class PoleCollision(NumericalError):
    """A surface point lies too close to the stereographic pole."""
