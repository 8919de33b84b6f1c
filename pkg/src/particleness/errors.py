"""Exception types shared across the package."""


class ParticlenessError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(ParticlenessError):
    pass


class NonHermitianInputError(ParticlenessError):
    pass


class NotNormalizedError(ParticlenessError):
    pass


class InvalidRankError(ParticlenessError):
    pass


class WrongDimensionError(ParticlenessError):
    pass


class WrongSpecError(ParticlenessError):
    """Operation requires the default equally spaced level structure."""


class NotResourcefulError(ParticlenessError):
    pass


class IncompleteKrausSetError(ParticlenessError):
    pass


class TooManyKrausOperatorsError(ParticlenessError):
    pass


class EmptyInputError(ParticlenessError):
    pass


class SolverNotConvergedError(ParticlenessError):
    """Conic solver failed to reach its tolerances.

    Carries the best primal iterate found and the duality gap at that
    iterate so callers can report a partial result.
    """

    def __init__(self, message, best=None, gap=None, iterations=None):
        super().__init__(message)
        self.best = best
        self.gap = gap
        self.iterations = iterations


class ScanFailureError(ParticlenessError):
    """Too many per-sample solver failures for scan statistics to be trusted."""


class HermiticityWarning(UserWarning):
    """Input required symmetrization beyond the accepted defect tolerance."""
