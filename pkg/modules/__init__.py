"""
Modules package for galband
Elliptic kernel, GAL potentials, QES catalog, Floquet oracle, SUSY partners and Heun mapping
"""

__version__ = "1.0.0"
__author__ = "galband developers"

# Import main classes for easy access
from .catalog import QESCatalog
from .spectral import FloquetOracle
from .susy import SusyPartnerBuilder

__all__ = [
    'QESCatalog',
    'FloquetOracle',
    'SusyPartnerBuilder'
]
