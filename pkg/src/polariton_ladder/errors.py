"""Exception types shared across the package.

The CLI maps these onto exit codes (config errors -> 2, solver
non-convergence -> 3, capacity/size limits -> 4).
"""


class LadderError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(LadderError):
    """Invalid or inconsistent parameters, bases, or CLI configuration."""


class CapacityError(LadderError):
    """Requested sector is empty: the caps cannot accommodate N excitations."""


class DimensionLimitError(LadderError):
    """A basis or dense object would exceed the configured size limit."""


class ConvergenceError(LadderError):
    """An iterative solver failed to reach the requested tolerance."""


class StateNotFoundError(LadderError, KeyError):
    """Occupation state does not belong to the basis sector."""
