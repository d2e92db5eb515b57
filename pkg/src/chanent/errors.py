"""Exception hierarchy shared by all modules and mapped to CLI exit codes."""


class ChanentError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(ChanentError, ValueError):
    """Malformed input: wrong shapes, non-Hermitian matrices, bad parameters."""


class DomainError(ChanentError, ValueError):
    """A function was evaluated outside its mathematical domain."""


class PreconditionError(ChanentError, ValueError):
    """A shortcut was requested whose precondition does not hold."""


class NumericalError(ChanentError, ArithmeticError):
    """An iterative routine produced NaN or failed to make progress."""
