"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition; message names the condition."""


class CeilingError(ValidationError):
    """A requested size exceeds the configured ceiling."""


class PrecisionError(RuntimeError):
    """Numeric computation failed to certify after bounded precision escalation."""

    def __init__(self, message, attempted_precisions=None):
        super().__init__(message)
        self.attempted_precisions = list(attempted_precisions or [])


class DegenerateResultantError(RuntimeError):
    """An elimination step collapsed to the zero polynomial.

    Usually a non-generic coordinate collision; shearing x -> x + k*y for a
    small k restores genericity.
    """
