class DomainError(ValueError):
    """Raised when a request falls outside the mathematical domain of an operation.

    The command-line front end maps these to exit code 1.
    """


class ConvergenceError(ArithmeticError):
    """An iterative method stopped without meeting its tolerance.

    ``best`` carries the last iterate so callers can inspect or reuse it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
