"""Exception hierarchy shared by the library and the CLI."""


class QueueingModelError(Exception):
    """Base class for every error raised by this package."""


class ConfigValidationError(QueueingModelError, ValueError):
    """A configuration or a parameter violates its invariants."""


class NormalizationOverflowError(QueueingModelError, ArithmeticError):
    """Normalization constants cannot be represented in double precision."""

    def __init__(self, message: str, max_load: float):
        super().__init__(f"{message} (max load {max_load:.6g})")
        self.max_load = max_load


class StateSpaceTooLargeError(QueueingModelError, ValueError):
    """The brute-force oracle was asked to enumerate too many states."""


class OptimizationError(QueueingModelError, RuntimeError):
    """The routing optimizer could not produce a result."""


class DivergenceError(QueueingModelError, RuntimeError):
    """A learning run diverged."""


class OracleFailure(QueueingModelError, AssertionError):
    """A validation oracle suite found a mismatch."""
