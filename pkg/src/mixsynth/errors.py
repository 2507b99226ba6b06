"""Exception types.

PreconditionError and its subclasses signal bad inputs (the command-line
driver maps them to exit code 2); SolverStallError signals a certification
budget running out (exit code 3) and carries the best bracket found.
"""


class MixsynthError(Exception):
    """Base class for all package errors."""


class PreconditionError(MixsynthError):
    """An operation was called outside its documented domain."""


class DimensionMismatchError(PreconditionError):
    """Operands live on different Hilbert-space dimensions."""


class CoveringValidityError(PreconditionError):
    """A covering construction was requested outside its validity range."""


class InsufficientLibraryError(PreconditionError):
    """No library entry reaches the requested accuracy.

    ``best_error`` records the distance of the closest entry found.
    """

    def __init__(self, message, best_error=None):
        super().__init__(message)
        self.best_error = best_error


class SolverStallError(MixsynthError):
    """The solver exhausted its budget before certifying the tolerance.

    ``solution`` holds the best certified bracket reached (a
    ConvexApproxSolution); its gap exceeds the requested tolerance.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution
