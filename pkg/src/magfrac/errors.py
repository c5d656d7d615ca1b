"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A precondition or configuration value is out of range or malformed."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class NumericalContractError(RuntimeError):
    """A numerical tolerance contract was violated (not a usage error)."""
