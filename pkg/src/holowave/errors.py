"""Exception hierarchy shared by the solver modules."""


class HolowaveError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(HolowaveError, ValueError):
    """A physical or numerical parameter is outside its admissible range."""


class SymbolDomainError(HolowaveError, ValueError):
    """A Fourier multiplier is not finite at some grid wavenumber."""


class ZeroModeError(HolowaveError, ValueError):
    """An operator undefined on constants received a field with non-negligible mean."""


class DegeneracyError(HolowaveError):
    """|1 + W_alpha| fell below its lower bound, or the logarithm has no admissible branch."""


class LogBranchError(DegeneracyError):
    pass


class UsageError(HolowaveError, ValueError):
    """An operation was called outside the regime it is defined for."""


class ConfigError(HolowaveError, ValueError):
    pass


class NewtonFailure(HolowaveError):
    """Newton iteration did not reach tolerance.

    ``reason`` is one of ``"diverged"``, ``"stagnated"`` or
    ``"degenerate-profile"``; ``iterate`` holds the last accepted state so
    callers can still inspect (or certify) it.
    """

    def __init__(self, reason, message="", iterate=None, residual_norm=float("nan"), history=None):
        super().__init__(f"{reason}: {message}" if message else reason)
        self.reason = reason
        self.iterate = iterate
        self.residual_norm = residual_norm
        self.history = history or []


class SeamWarning(UserWarning):
    """Profile mass near the periodization seam exceeds tolerance."""


class MagnitudeError(HolowaveError, OverflowError):
    """A field is too large for the exponential nonlinearities to be evaluated."""
