"""Exception and warning types raised by ivexp."""


class IvexpError(Exception):
    """Base class for all library errors."""


class DimensionError(IvexpError, ValueError):
    pass


class MatrixExpError(IvexpError):
    """Raised when scaling-and-squaring would need more halvings than allowed."""


class InfeasibleError(IvexpError):
    """A linear program or row polytope has no feasible point."""


class UnboundedError(IvexpError):
    pass


class EmptyRowError(InfeasibleError):
    """A generator row cannot reach a zero row sum within its bounds."""

    def __init__(self, row, message=None):
        self.row = row
        super().__init__(message or f"row {row}: zero row sum unattainable within bounds")


class MonotonicityViolation(IvexpError):
    """An interval input met a matrix set that does not preserve componentwise order."""


class PartitionError(IvexpError, ValueError):
    pass


class BoundParamError(IvexpError, ValueError):
    pass


class ToleranceUnreachable(IvexpError):
    pass


class CapExceededError(IvexpError):
    """Brute-force enumeration would exceed its combinatorial cap."""


class UnsoundWarning(UserWarning):
    """Emitted when a result cannot be certified as an enclosure."""
