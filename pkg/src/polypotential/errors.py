"""Exception types raised across the package."""


class PolypotentialError(Exception):
    """Base class for all package errors."""


class DomainError(PolypotentialError, ValueError):
    """An argument lies outside the domain where the formula is defined."""


class DegenerateError(PolypotentialError, ArithmeticError):
    """A computation hit a numerical degeneracy (pole, zero denominator)."""


class ConvergenceError(PolypotentialError, ArithmeticError):
    """An iterative method failed to reach its tolerance."""


class BudgetExceeded(PolypotentialError, RuntimeError):
    """A requested quadrature or grid budget exceeds the resource limit."""


class SchemaError(PolypotentialError, ValueError):
    """Malformed problem or configuration document."""


class HypothesisNotMet(PolypotentialError, ValueError):
    """The data does not satisfy the hypotheses of the checked statement."""
