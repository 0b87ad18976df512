"""Exception types shared across the package."""


class UltranaError(Exception):
    """Base class for all package-specific errors."""


class DomainError(UltranaError, ValueError):
    """A parameter violates a mathematical precondition (e.g. kappa <= 1)."""


class SingularityError(DomainError):
    """Evaluation requested at a genuine singularity (e.g. G_s at 0 for s <= d)."""


class ResourceLimitError(UltranaError, RuntimeError):
    """A configured resource cap (table size, enumeration count) was exceeded."""


class PrecisionError(UltranaError, ArithmeticError):
    """Two independent evaluation routes disagree beyond the working precision.

    Callers are expected to retry at doubled precision.
    """


class ToleranceError(UltranaError, ArithmeticError):
    """A quadrature or iterative routine failed to meet its declared tolerance."""
