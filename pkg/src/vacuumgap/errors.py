"""Exception hierarchy shared by all vacuumgap modules."""


class VacuumGapError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(VacuumGapError, ValueError):
    """An argument violates a documented precondition."""


class NonConvergence(VacuumGapError, RuntimeError):
    """A quadrature or summation failed to reach the requested tolerance.

    Carries the best estimate and the achieved error so callers can decide
    whether the partial result is still usable.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SingularMatrix(VacuumGapError):
    """A pivot magnitude underflowed during factorization."""


class SpectralRadiusExceeded(VacuumGapError):
    """The round-trip operator has spectral radius >= 1."""


class DegeneratePoint(InvalidInput):
    """Frequency and momentum are both zero where a division requires otherwise."""


class IdealLimitRequested(VacuumGapError):
    """The ideal-conductor model has no finite permittivity; use the ideal limit."""


class IllConditioned(VacuumGapError):
    """A collocation system is too ill-conditioned to trust (deep profile)."""


class ResidualTooLarge(VacuumGapError):
    """Boundary-condition residual at test points exceeds tolerance."""


class ConfigError(VacuumGapError):
    """A scenario configuration file is missing or contradictory."""
