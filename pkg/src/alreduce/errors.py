"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates an operation's preconditions."""


class DomainError(ValueError):
    """An input lies outside a special function's domain."""


class IntegrationError(RuntimeError):
    """A right-hand side produced a non-finite value during stepping."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class BracketError(RuntimeError):
    """A root bracket failed where analysis says it cannot; internal bug."""
