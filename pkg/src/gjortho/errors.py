"""Exception hierarchy shared by all modules."""


class GJOrthoError(Exception):
    """Base class for every error raised by the package."""


class SingularEvaluation(GJOrthoError, ValueError):
    """A weight was evaluated exactly at a singular point where it is unbounded."""


class IncompatiblePoints(GJOrthoError, ValueError):
    """Two weights place distinct singular points closer than the coincidence tolerance."""


class EmptyRegion(GJOrthoError, ValueError):
    """A restricted region has no interior left."""


class NoConvergence(GJOrthoError, RuntimeError):
    """Adaptive integration exhausted its subdivision budget."""


class DivergentIntegrand(GJOrthoError, ArithmeticError):
    """The integrand is not integrable against the requested measure."""


class NotIntegrable(GJOrthoError, ValueError):
    """A measure density fails to be in L^1."""


class ConvergenceFailure(GJOrthoError, RuntimeError):
    """An iterative construction (e.g. recurrence coefficients) stalled."""


class EigenFailure(GJOrthoError, RuntimeError):
    """The tridiagonal eigensolver failed."""


class DegreeOutOfRange(GJOrthoError, IndexError):
    """A polynomial degree beyond the stored recurrence table was requested."""


class IllConditioned(GJOrthoError, ArithmeticError):
    """A least-squares system is rank deficient on its probe grid."""


class DegenerateSample(GJOrthoError, ArithmeticError):
    """Every sampled ratio had a vanishing denominator."""


class ZeroDenominator(GJOrthoError, ZeroDivisionError):
    """A ratio was requested for an input whose denominator vanishes."""


class SizeMismatch(GJOrthoError, ValueError):
    """Interpolation data does not match the number of nodes."""


class NumericalBreakdown(GJOrthoError, ArithmeticError):
    """Divided differences overflowed or lost all significance."""


class NonLogWeight(GJOrthoError, ValueError):
    """A weight has a non-constant factor without declared bounds."""
