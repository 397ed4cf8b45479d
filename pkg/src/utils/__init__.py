"""Utility functions."""

from .exceptions import (
    AimCcgfError,
    ConfigError,
    ConvergenceError,
    DomainError,
    NumericalError,
    ResourceLimitError,
    StateError,
    StatisticalError,
    ValidationError,
)
from .helpers import config_hash, load_config, setup_logging

__all__ = [
    "AimCcgfError",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "NumericalError",
    "ResourceLimitError",
    "StateError",
    "StatisticalError",
    "ValidationError",
    "config_hash",
    "load_config",
    "setup_logging",
]
