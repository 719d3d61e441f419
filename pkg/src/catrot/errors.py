"""Exception types shared across the package."""


class CatrotError(Exception):
    """Base class for library errors."""


class CapacityError(CatrotError):
    """A size cap (simulation qubits, discrete-log table, degree) was exceeded."""


class NotPrimitiveError(CatrotError, ValueError):
    """A candidate polynomial failed primitivity certification.

    ``reason`` is one of ``"reducible"``, ``"not primitive"`` or ``"invalid"``.
    """

    def __init__(self, message, reason):
        super().__init__(message)
        self.reason = reason


class NoPolynomialFound(CatrotError):
    """No primitive polynomial exists within the requested term budget."""
