"""Error types shared across the package."""


class NumericError(RuntimeError):
    """A computation lost its accuracy guarantee.

    Raised when cancellation exhausts the working precision, a linear
    system turns out singular, or a residual check fails. The message
    carries the offending parameters.
    """


class StructuralViolationError(RuntimeError):
    """A structural prediction failed and is surfaced, never repaired.

    Example: the derivative profile shows zero or several sign changes
    where exactly one is guaranteed.
    """


class RunawayError(RuntimeError):
    """A simulated trajectory exceeded the hard step cap."""
