"""Exception hierarchy shared across the package."""


class OptPotError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(OptPotError, ValueError):
    pass


class GridMismatchError(OptPotError, ValueError):
    pass


class InputFormatError(OptPotError, ValueError):
    pass


class ConsistencyError(OptPotError, RuntimeError):
    """Raised when eigenpair index certification fails (grid too coarse)."""


class ConditioningError(OptPotError, RuntimeError):
    pass


class ConvergenceError(OptPotError, RuntimeError):
    """An iterative procedure ran out of budget.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (last residual, iteration counts, homotopy position).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ConfigError(OptPotError, ValueError):
    pass
