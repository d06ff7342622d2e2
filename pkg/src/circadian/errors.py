"""Exception types shared across the analysis modules."""


class CircadianError(Exception):
    """Base class for all errors raised by this package."""


class ConstraintViolation(CircadianError, ValueError):
    pass


class SaturationExceeded(CircadianError, ValueError):
    """A Michaelis-Menten target at or above its maximum rate.

    ``stage`` names the equilibrium-cascade step that failed (``"P2"``,
    ``"P1"``, ``"P0"``) or is None for a bare inversion.
    """

    def __init__(self, message, stage=None, target=None, limit=None):
        super().__init__(message)
        self.stage = stage
        self.target = target
        self.limit = limit


class NoBracket(CircadianError):
    pass


class NonFinite(CircadianError, FloatingPointError):
    pass


class NotConverged(CircadianError):
    def __init__(self, message, state=None, t=None):
        super().__init__(message)
        self.state = state
        self.t = t


class InsufficientData(CircadianError):
    """Too few peaks for a period estimate. Carries the amplitudes anyway."""

    def __init__(self, message, amplitude=None, n_peaks=0):
        super().__init__(message)
        self.amplitude = amplitude
        self.n_peaks = n_peaks


class UsageError(CircadianError, ValueError):
    pass
