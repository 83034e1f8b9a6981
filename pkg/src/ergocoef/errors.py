"""Exception hierarchy shared by the library and the CLI."""


class ErgoError(Exception):
    """Base class for all package errors."""


class ValidationError(ErgoError, ValueError):
    """Malformed input: wrong shape, negative entries, bad flags."""


class PreconditionError(ErgoError):
    """Input is well formed but violates a mathematical precondition."""


class ConvergenceError(ErgoError, RuntimeError):
    """An iterative routine ran out of iterations."""


class InternalError(ErgoError, AssertionError):
    """A proven inequality failed; indicates a bug, not a finding."""
