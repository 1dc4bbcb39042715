"""Exception types shared across the package."""


class MacwtapError(Exception):
    """Base class for all package errors."""


class ValidationError(MacwtapError, ValueError):
    """A probability table, parameter, or file failed validation."""


class DimensionMismatch(ValidationError):
    """Alphabet sizes or table shapes are inconsistent."""


class CapExceeded(MacwtapError, RuntimeError):
    """An exact enumeration would exceed the configured cap.

    Carries the cap that would be required so callers can raise limits
    deliberately instead of silently burning memory.
    """

    def __init__(self, what: str, required: int, cap: int):
        self.what = what
        self.required = required
        self.cap = cap
        super().__init__(
            f"{what} needs {required} items but the cap is {cap}; "
            f"raise the cap explicitly to proceed"
        )
