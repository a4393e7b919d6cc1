"""
Created on 2026-10-03

@author: wf
"""


class HistoriesError(Exception):
    """
    base class of all errors raised by pyHistories
    """


class DimensionError(HistoriesError, ValueError):
    """
    non-square matrices or mismatched Hilbert space dimensions
    """


class ValidationError(HistoriesError, ValueError):
    """
    an object failed its well-formedness check e.g. a projector that is not idempotent
    """


class UnsupportedConfigurationError(ValidationError):
    """
    a valid object that an operation does not support
    """


class ConfigError(ValidationError):
    """
    a malformed model configuration
    """


class ContractError(HistoriesError, ValueError):
    """
    an operation was called with the wrong kind of argument
    e.g. a history segment where a full history is required
    """


class ZeroMeasureError(HistoriesError, ValueError):
    """
    a conditional probability was requested for a condition of (numerically) zero measure
    """


class NumericalIntegrityError(HistoriesError, ArithmeticError):
    """
    a computed quantity left its admissible range by more than the tolerance
    """


class ResourceBudgetError(HistoriesError, RuntimeError):
    """
    an enumeration or state would exceed the configured resource budget
    """
