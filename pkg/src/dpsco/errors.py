"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration: unknown keys, bad grids, unregistered names."""


class RefusalError(RuntimeError):
    """A solver refused to run because a privacy precondition failed.

    Refusals are not bugs: they signal that the requested (epsilon, n,
    smoothness) combination is outside the regime where the mechanism's
    privacy guarantee holds.  ``reason`` is human readable; ``requirement``
    optionally carries the violated threshold.
    """

    def __init__(self, reason, requirement=None):
        super().__init__(reason)
        self.reason = reason
        self.requirement = requirement


class NumericError(RuntimeError):
    """An iterative routine failed to reach its tolerance within its cap."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
