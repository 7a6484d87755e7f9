"""Exception and warning types raised across qwlab."""


class QWLabError(Exception):
    """Base class for all qwlab errors."""


class DomainError(QWLabError, ValueError):
    """A model parameter lies outside the interval where a result holds."""


class WindowOverflow(QWLabError):
    """The walker's support would reach past the simulated lattice window."""


class BadLeadingCoefficient(QWLabError, ValueError):
    """A series operation needs a specific constant term (e.g. sqrt needs 1)."""


class PoleError(QWLabError, ZeroDivisionError):
    """Evaluation requested at (or numerically on top of) a pole."""


class PreconditionError(QWLabError, ValueError):
    """A coin field violates an assumption of the generating-function method."""


class ConsistencyError(QWLabError, ArithmeticError):
    """Two independent computations of the same quantity disagree."""


class BranchAmbiguity(UserWarning):
    """The unit-circle formula for f0 is used outside the arcs where it holds."""


class DivergenceWarning(RuntimeWarning):
    """A truncated continued fraction has not settled at the requested depth."""
