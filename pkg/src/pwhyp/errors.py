"""Exception types shared across the package."""


class PwhypError(Exception):
    """Base class for all package errors."""


class PoleError(PwhypError):
    """A gamma-type factor is evaluated at (or within tolerance of) a pole."""


class DomainError(PwhypError):
    """Arguments violate a documented precondition."""


class NoConvergence(PwhypError):
    """An iteration or refinement cap was reached before the tolerance."""


class LogarithmicCase(PwhypError):
    """Connection formula requested in the degenerate (logarithmic) case."""


class SingularPoint(PwhypError):
    """Evaluation requested exactly at a singular point of the function."""


class StripViolation(PwhypError):
    """A Mellin/Barnes operation was requested outside its convergence strip."""
