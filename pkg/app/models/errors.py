"""
Exception types raised by the interferometry services.

Input problems derive from ValueError and numerical failures from
RuntimeError, so callers can keep catching the built-in families.
"""


class InvalidInputError(ValueError):
    """A parameter violates the documented preconditions."""


class IndexRangeError(InvalidInputError):
    """A factorial argument or angular-momentum index is out of range."""


class NumericError(RuntimeError):
    """A numerical construction failed its own residual check."""


class ConsistencyError(RuntimeError):
    """An internal identity (realness, moment ordering) was violated."""


class NoSignalError(RuntimeError):
    """The observable carries no phase information anywhere on the grid."""
