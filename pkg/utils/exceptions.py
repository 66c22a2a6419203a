"""
Exception hierarchy for galband
"""

from typing import Optional


class GalbandError(Exception):
    """Base class for all galband errors"""


class DomainError(GalbandError, ValueError):
    """Argument outside the domain of a function (e.g. K at m >= 1)"""


class PoleError(GalbandError):
    """Evaluation too close to a pole or zero of a factored expression"""

    def __init__(self, message: str, location: Optional[complex] = None):
        super().__init__(message)
        self.location = location


class ConfigurationError(GalbandError):
    """Invalid spec or run configuration"""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class UnsupportedFamilyError(GalbandError):
    """No closed-form family or QES closure matches the parameters"""


class IllConditionedError(GalbandError):
    """Collocation system too ill-conditioned to trust"""

    def __init__(self, message: str, condition_number: float):
        super().__init__(message)
        self.condition_number = condition_number


class IntegrationError(GalbandError):
    """The ODE integrator failed before reaching the end of the period"""

    def __init__(self, message: str, location: Optional[float] = None):
        super().__init__(message)
        self.location = location
