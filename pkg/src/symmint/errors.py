"""Exception types shared across the package."""


class SymmintError(Exception):
    """Base class for all numerical/usage errors raised by symmint."""


class NoConvergence(SymmintError):
    """An integration engine exhausted its budget above the requested tolerance.

    Carries the best value and error estimate reached so callers can inspect
    partial results (e.g. to distinguish slow convergence from divergence).
    """

    def __init__(self, message, value=None, err=None):
        super().__init__(message)
        self.value = value
        self.err = err


class OddDimension(SymmintError):
    """Pfaffian requested for an odd-dimensional matrix (always a caller bug)."""


class NotSkew(SymmintError):
    """Matrix tagged skew violates A^T = -A beyond tolerance."""


class ImagResidualTooLarge(SymmintError):
    """A circle evaluation produced an imaginary part too large to discard."""


class DegenerateMeasure(SymmintError):
    """Moment matrix numerically singular: measure supported on too few points."""


class NonIntegrableWeight(SymmintError):
    """A reduced measure has divergent total mass."""


class BudgetExceeded(SymmintError):
    """Brute-force tensor grid would exceed the permitted size."""


class NonSamplable(SymmintError):
    """Inverse-CDF sampling table could not be built (flat or invalid CDF)."""


class DivisionByZeroMass(SymmintError):
    """Denominator of an expectation ratio vanished."""
