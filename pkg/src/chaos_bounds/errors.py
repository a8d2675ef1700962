"""Exception types shared across the package.

Everything raised on purpose derives from ChaosBoundsError so callers (and the
CLI) can map domain problems to a single exit path.
"""


class ChaosBoundsError(Exception):
    """Base class for all errors raised by chaos_bounds."""


class DomainError(ChaosBoundsError):
    """An argument is outside the mathematical domain of the operation."""


class SupercriticalError(DomainError):
    """Offspring mean is >= 1 (or too close to 1 for float64 arithmetic)."""


class InsufficientMoments(ChaosBoundsError):
    """A moment of higher order than the stored list was requested."""


class NoConvergence(ChaosBoundsError):
    """A series truncation could not be certified."""


class DivergentIntegral(DomainError):
    """The requested attenuation integral diverges (alpha * m <= 2)."""


class DivergentModel(DomainError):
    """The model has no finite mean/variance (interference with alpha <= 2)."""


class CapExceeded(ChaosBoundsError):
    """A simulated cascade outgrew the configured progeny cap."""


class UnknownFamily(ChaosBoundsError):
    """The operation needs a named distribution family, not a moment list."""


class RegimeError(DomainError):
    """Parameters are outside the regime a specialized formula was derived in."""


class EmptyInterval(DomainError):
    """Interval endpoints are inverted (a > b)."""
