"""Exception types shared across the package."""


class DiracgsError(Exception):
    """Base class for package errors."""


class GridMismatchError(DiracgsError):
    """Fields or operators built on different grids were combined."""


class ReprMismatchError(DiracgsError):
    """An operation received a field in the wrong representation."""


class DegenerateFiberError(DiracgsError):
    """Fiber maximization was asked for a direction with no plus part."""


class MaxIterationsError(DiracgsError):
    """An iteration hit its cap before reaching tolerance.

    The best iterate found so far is attached as ``best``.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class UniquenessError(DiracgsError):
    """Independent fiber-maximization starts disagreed beyond tolerance."""


class ModelValidationError(DiracgsError):
    """Model data violates a structural requirement."""


class ConfigError(DiracgsError):
    """A config file is malformed or holds an invalid value."""
