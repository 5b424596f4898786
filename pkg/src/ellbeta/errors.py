"""Exception types shared across the package."""


class EllBetaError(Exception):
    """Base class for all numerical errors raised by ellbeta."""


class DomainError(EllBetaError, ValueError):
    """An argument lies outside the region where a product or integral converges."""


class TruncationError(EllBetaError):
    """The geometric tail bound needs more factors than the policy allows."""


class PoleError(EllBetaError):
    """A denominator factor vanished (up to the pole tolerance).

    ``location`` is the offending argument and ``index`` the product index
    (``(j,)`` or ``(j, k)``) of the factor that vanished.
    """

    def __init__(self, message, location=None, index=None):
        super().__init__(message)
        self.location = location
        self.index = index


class ConfigError(EllBetaError):
    """Malformed run configuration."""
