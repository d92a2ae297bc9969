"""Exception types shared across the package."""


class HallforgeError(Exception):
    """Base class for package errors."""


class CapabilityError(HallforgeError):
    """The requested operation is not supported for this backend."""


class ResourceLimitError(HallforgeError):
    """A configured resource bound (dimension, field size) was exceeded."""

    def __init__(self, message, *, limit=None, requested=None):
        super().__init__(message)
        self.limit = limit
        self.requested = requested


class NonPolynomialCountError(HallforgeError):
    """Point counts failed to stabilize to an integer polynomial in q."""


class BackendMismatchError(HallforgeError):
    """Operands built over different backends were combined."""


class NonConstantFamilyError(HallforgeError):
    """Sampled per-point structure constants differ along a family."""


class InternalInvariantError(HallforgeError):
    """An internal consistency check failed; indicates a backend bug."""
