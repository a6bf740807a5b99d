"""Exception taxonomy shared across the package.

The CLI maps these onto distinct exit codes, so physics failures,
configuration mistakes and cache corruption stay distinguishable.
"""


class FiberQedError(Exception):
    """Base class for all package errors."""


class DomainError(FiberQedError, ValueError):
    """Input outside the mathematical domain of an operation."""


class NoGuidedModeError(FiberQedError):
    """The fiber eigenvalue equation has no root in the guided bracket."""


class MultipleModesError(FiberQedError):
    """More than one root in the guided bracket (single-mode assumption broken)."""


class ConvergenceError(FiberQedError):
    """A quadrature/truncation certificate could not be met.

    Carries the tolerance that was actually achieved.
    """

    def __init__(self, message, achieved_tol=None):
        super().__init__(message)
        self.achieved_tol = achieved_tol


class ConfigError(FiberQedError):
    """Malformed or inconsistent run configuration."""


class CacheError(FiberQedError):
    """Corrupt or incompatible cache file."""
