"""Exception hierarchy shared by the solver, emulation and CLI layers."""

from typing import Optional


class AimCcgfError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(AimCcgfError, ValueError):
    """Configuration could not be parsed or contains unknown keys."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            location = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{message} ({location})"
        super().__init__(message)


class DomainError(AimCcgfError, ValueError):
    """An argument violates an operation's precondition."""


class ResourceLimitError(AimCcgfError, RuntimeError):
    """A requested problem size exceeds the configured cap."""


class ConvergenceError(AimCcgfError, RuntimeError):
    """An iterative solver failed to reach its tolerance."""

    def __init__(self, message: str, residual_norm: float, iterations: int):
        self.residual_norm = residual_norm
        self.iterations = iterations
        super().__init__(f"{message} (residual {residual_norm:.3e} after {iterations} iterations)")


class NumericalError(AimCcgfError, ArithmeticError):
    """A linear system is singular or too ill-conditioned to trust."""

    def __init__(self, message: str, condition_number: float):
        self.condition_number = condition_number
        super().__init__(f"{message} (condition number {condition_number:.3e})")


class StatisticalError(AimCcgfError, RuntimeError):
    """A sampling estimator had no usable outcomes."""


class StateError(AimCcgfError, RuntimeError):
    """An object is not in the state an operation requires."""


class ValidationError(AimCcgfError, RuntimeError):
    """Hybrid results deviate from the exact reference by more than allowed."""

    def __init__(self, message: str, max_deviation: float, threshold: float):
        self.max_deviation = max_deviation
        self.threshold = threshold
        super().__init__(f"{message} (max deviation {max_deviation:.3e} > {threshold:.3e})")
