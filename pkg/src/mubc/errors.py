"""Exception types raised across the package."""


class MubcError(ValueError):
    """Base class for invalid-input errors."""


class DimensionError(MubcError):
    pass


class NormalizationError(MubcError):
    pass


class NotHermitianError(MubcError):
    pass


class InvalidStateError(MubcError):
    """A matrix failed the density-matrix invariants."""


class MubValidationError(MubcError):
    """A set of bases is not orthonormal or not mutually unbiased."""


class UnsupportedDimensionError(MubcError):
    pass


class InadmissibleError(MubcError):
    """Bound parameters violate the admissibility inequality."""
