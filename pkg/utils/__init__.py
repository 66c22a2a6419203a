"""
Utilities package for galband
Contains logging helpers and the exception hierarchy
"""

__version__ = "1.0.0"

from .logger import setup_logger, log_execution_time, log_memory_usage
from .exceptions import (
    ConfigurationError,
    DomainError,
    GalbandError,
    IllConditionedError,
    IntegrationError,
    PoleError,
    UnsupportedFamilyError,
)

__all__ = [
    'setup_logger',
    'log_execution_time',
    'log_memory_usage',
    'GalbandError',
    'DomainError',
    'PoleError',
    'ConfigurationError',
    'UnsupportedFamilyError',
    'IllConditionedError',
    'IntegrationError'
]
