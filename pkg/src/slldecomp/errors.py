"""Exception types raised across the package."""


class ParameterError(ValueError):
    """An argument is outside the domain an operation is defined on."""


class DimensionError(ValueError):
    """A bit string does not have the length the problem expects."""


class PlateauError(ValueError):
    """Two consecutive unitation values are equal, so no sharp monotonicity profile exists."""


class ProfileError(ValueError):
    """A monotonicity profile violates the interleaving of minima and maxima."""


class UndecidableError(ValueError):
    """The dependent-pair distribution is stochastically independent; no population size suffices."""


class InsufficientSampleError(ValueError):
    """Too few individuals to estimate pairwise statistics."""
