"""Exception hierarchy shared by all gaussfock modules."""


class GaussFockError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(GaussFockError, ValueError):
    """Malformed or out-of-domain input (shape, NaN, asymmetry, ...)."""


class InvalidDimensionError(InvalidInputError):
    """A mode count or Fock cutoff is outside its allowed range."""


class InvalidIndexError(InvalidInputError):
    """Tail modes are indexed from 1."""


class InvalidParameterError(InvalidInputError):
    """A physical parameter is outside its domain (e.g. s <= 0, |lambda| > 1)."""


class NotPositiveDefiniteError(GaussFockError, ValueError):
    """A matrix required to be symmetric positive definite is not."""


class NumericalDegeneracyError(GaussFockError, ArithmeticError):
    """Eigenvalues that must come in +/- pairs could not be paired."""


class InfiniteParameterError(GaussFockError, ValueError):
    """The requested parameter is infinite (vacuum mode, d = 1)."""


class UnsupportedOperationError(GaussFockError):
    """The operation is outside the data model (e.g. displacing a tail mode)."""


class ValidationError(GaussFockError):
    """A state fails the admissibility conditions required by an operation."""


class NoDensityMatrixError(GaussFockError):
    """The tail is not summable, so the state has no trace-class density."""


class CapacityError(GaussFockError):
    """A truncated Fock space exceeds the configured dimension cap."""
