"""Exception hierarchy for the toolkit.

Each family carries the process exit code the CLI reports for it.
"""

from typing import Any, Dict, Optional


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = 1


# --- Configuration / precondition errors (exit 2) ---


class ConfigError(ToolkitError, ValueError):
    """Invalid configuration or violated precondition."""

    exit_code = 2


class UnsupportedGeometryError(ConfigError):
    """Operation requires a different window shape (e.g. a rectangle)."""


class InvalidPartitionError(ConfigError):
    """Partition cells overlap, leave gaps, or are not simple polygons."""


class DegenerateSeedError(ConfigError):
    """Tessellation seeds are duplicated or outside the window."""


class OutOfDomainError(ConfigError):
    """Point lies outside the observation window."""


class DomainError(ConfigError):
    """Argument outside the mathematical domain of the operation."""


class UnsupportedRuleError(ConfigError):
    """A rule of thumb is not defined for the given input."""


# --- Numerical failures (exit 3) ---


class NumericalError(ToolkitError, RuntimeError):
    """Numerical failure during simulation or estimation."""

    exit_code = 3


class InsufficientPointsError(NumericalError):
    """Too few points for the requested estimator."""


class SimulationOverflowError(NumericalError):
    """exp(m + Z) overflows for the requested mean model."""


class EmbeddingError(NumericalError):
    """Circulant embedding and dense fallback both failed."""


class InvalidIntensityError(NumericalError):
    """Non-positive intensity at a data point."""


class DegeneratePilotError(NumericalError):
    """Pilot intensity vanishes at a data point."""


class SelectionFailureError(NumericalError):
    """No bandwidth candidate yields a usable estimate."""


class InfiniteWeightError(NumericalError):
    """Translation-correction weight is infinite for the pair."""


class SamplingError(NumericalError):
    """Rejection sampling exhausted its budget."""


class NonConvergenceError(NumericalError):
    """Every optimizer start failed to converge."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


# --- I/O (exit 4) ---


class DataIOError(ToolkitError):
    """Reading or writing an artifact failed."""

    exit_code = 4
