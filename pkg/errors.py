"""Exception types shared by the newsvendor modules."""


class NewsvendorError(Exception):
    """Base class for every error raised on purpose by this repo."""


class ValidationError(NewsvendorError, ValueError):
    """Invalid construction parameters, infeasible cluster parameters or bad config."""


class DomainError(NewsvendorError, ValueError):
    """An argument lies outside the domain of the operation."""


class BoundViolationError(NewsvendorError):
    """An applicable upper bound was exceeded by a simulated or exact regret."""

    def __init__(self, message: str, rows=None):
        super().__init__(message)
        self.rows = rows
