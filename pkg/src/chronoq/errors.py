"""Exception hierarchy. Each class carries the process exit code the CLI maps it to."""


class ChronoqError(Exception):
    exit_code = 1


class UsageError(ChronoqError, ValueError):
    exit_code = 64


class NumericalError(ChronoqError, ArithmeticError):
    """A non-finite amplitude appeared, or an eigensolver failed to converge."""

    exit_code = 3


class DivergenceError(NumericalError):
    """Adaptive step size collapsed below the underflow floor."""


class InconclusiveError(ChronoqError):
    """Too few usable error samples to fit a convergence order."""


class GateNotFoundError(ChronoqError):
    exit_code = 4

    def __init__(self, message, best_peak=0.0, best_time=None, max_norm_error=None):
        super().__init__(message)
        self.best_peak = best_peak
        self.best_time = best_time
        self.max_norm_error = max_norm_error
