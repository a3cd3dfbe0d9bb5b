"""Exception types shared by every module.

The CLI maps ``InputError`` to exit status 2 and everything else that is a
domain outcome (absent, failure report) to exit status 1.
"""


class TuranLabError(Exception):
    """Base class for library errors."""


class InputError(TuranLabError, ValueError):
    """Malformed or out-of-range input."""


class DomainError(TuranLabError, ValueError):
    """The operation is undefined on this input (e.g. an empty graph)."""


class PreconditionError(TuranLabError):
    """A mathematical precondition of the operation does not hold."""
