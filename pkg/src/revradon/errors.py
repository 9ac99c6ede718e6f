"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes, so every failure a user can trigger
through a config file should surface as one of these classes.
"""


class RevRadonError(Exception):
    """Base class for all package errors."""


class DomainError(RevRadonError, ValueError):
    """A point lies outside the admissible parameter domain."""


class SingularRatioError(DomainError):
    """``h_s`` vanishes where the ratio ``h_x / h_s`` is needed."""


class ConfigurationError(RevRadonError, ValueError):
    """Grid or solver settings are inconsistent or degenerate."""


class PreconditionError(RevRadonError, ValueError):
    """Input data violate a modelling assumption (e.g. support margin)."""


class NumericalError(RevRadonError, ArithmeticError):
    """Base for numerical failures (exit code 3 in the CLI)."""


class IllConditionedError(NumericalError):
    """A linear system is singular to working precision."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class StepSizeError(NumericalError):
    """An iterative solver diverged; the relaxation is too large."""


class UndefinedMetricError(NumericalError):
    """A metric is undefined for the given inputs (e.g. zero reference)."""
