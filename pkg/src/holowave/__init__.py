"""Spectral workbench for travelling water waves in holomorphic coordinates."""

from .errors import (
    ConfigError,
    DegeneracyError,
    HolowaveError,
    LogBranchError,
    MagnitudeError,
    NewtonFailure,
    ParameterError,
    SeamWarning,
    SymbolDomainError,
    UsageError,
    ZeroModeError,
)
from .spectral import PeriodicGrid
from .steady import SteadyProfile, WaveParameters

__version__ = "0.1.0"
