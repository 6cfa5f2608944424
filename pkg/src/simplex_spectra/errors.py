"""Exception types shared across the package."""

__all__ = ["ParameterError", "SingularityError", "NumericError", "IterationError"]


class ParameterError(ValueError):
    """An argument lies outside an operation's documented domain."""


class SingularityError(ValueError):
    """Evaluation was requested at a point where the quantity is singular."""


class NumericError(RuntimeError):
    """A numerical precondition failed; the message carries diagnostics."""


class IterationError(RuntimeError):
    """An iteration hit its cap before reaching tolerance.

    The best iterate seen so far is attached as ``best`` so callers can
    inspect or accept it.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best
