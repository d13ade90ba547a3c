"""Exception hierarchy shared by the engine, harness and CLI."""


class CIOptError(Exception):
    """Base class for all package errors."""


class ConfigurationError(CIOptError, ValueError):
    """Malformed problem bounds, strategy parameters or engine settings."""


class UsageError(CIOptError, ValueError):
    """Bad user input: unknown problem name, empty result list, bad flag."""


class SelectionError(CIOptError, ValueError):
    """Roulette wheel called with weights that do not define a distribution."""


class EvaluationError(CIOptError, ArithmeticError):
    """Objective or constraint evaluation produced a non-finite value.

    The offending decision vector is kept on ``x`` so callers can log it.
    """

    def __init__(self, message, x=None, attempt=None):
        super().__init__(message)
        self.x = x
        self.attempt = attempt
