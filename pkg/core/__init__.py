"""
Pakiet z główną logiką systemu
"""
from .exceptions import (
    GroveError,
    DatasetError,
    ModelFormatError,
    AttackError,
    OracleError,
    FingerprintError,
    RegistryError,
    ExperimentError
)

__all__ = [
    'GroveError',
    'DatasetError',
    'ModelFormatError',
    'AttackError',
    'OracleError',
    'FingerprintError',
    'RegistryError',
    'ExperimentError'
]
