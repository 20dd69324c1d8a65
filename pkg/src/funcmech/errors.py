"""Exception types shared by all modules."""


class ValidationError(ValueError):
    """Raised when a parameter or input violates a precondition.

    ``key`` names the offending parameter when there is one, so the CLI can
    report it back to the user.
    """

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class NumericalFailure(RuntimeError):
    """Raised when a numerical procedure cannot meet its accuracy bound."""

    def __init__(self, message: str, achieved: float | None = None, bound: float | None = None):
        super().__init__(message)
        self.achieved = achieved
        self.bound = bound
