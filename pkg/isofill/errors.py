"""Exceptions raised across isofill.

Each class carries the exit code the command-line front end maps it to.
"""
from typing import Any, Optional


class IsofillError(Exception):
    exit_code = 1


class ConfigurationError(IsofillError):
    """Bad ring, preset or metric parameters, or a violated theorem hypothesis."""

    exit_code = 2


class ContractError(IsofillError):
    """An operation was called outside its precondition."""

    exit_code = 2


class InsufficientDataError(ContractError):
    pass


class MarginError(ContractError):
    pass


class BudgetExhaustedError(IsofillError):
    exit_code = 3


class CertificationError(IsofillError):
    """A step of the linear filling reduction could not be certified.

    The partial trace is attached so callers can write it out.
    """

    exit_code = 4

    def __init__(self, message: str, trace: Optional[Any] = None):
        super().__init__(message)
        self.trace = trace
