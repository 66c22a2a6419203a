"""
Pipeline package for galband
Contains the verification pipeline
"""

__version__ = "1.0.0"

from .processor import CRITERIA, VerificationProcessor, parse_suite

__all__ = [
    'CRITERIA',
    'VerificationProcessor',
    'parse_suite'
]
