"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class BracketError(ValueError):
    """A root-finding bracket does not enclose a sign change."""


class ConvergenceError(RuntimeError):
    """An iterative method exhausted its budget before converging.

    The best available iterate, when there is one, is kept on ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DataError(ValueError):
    """Input data is empty, non-numeric or contains nonpositive values."""
