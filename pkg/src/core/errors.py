"""
Exception types raised by the solvers, generators and validators.
"""


class WorstClassError(Exception):
    """Base class for toolkit-specific failures."""


class NotSeparableError(WorstClassError, ValueError):
    """Training data admits no strictly separating hyperplane."""


class IterationLimitError(WorstClassError, RuntimeError):
    """A solver exhausted its iteration budget before reaching tolerance."""

    def __init__(self, message: str, iterations: int = 0, violation: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.violation = violation


class NonFiniteError(WorstClassError, FloatingPointError):
    """An objective or iterate overflowed (typically: step size too large)."""


class BudgetError(WorstClassError, ValueError):
    """Theorem budget constants violate a side condition of the matching theorem."""
