"""
Wyjątki domenowe systemu
"""


class GroveError(Exception):
    """Bazowy wyjątek systemu"""


class DatasetError(GroveError, ValueError):
    """Niepoprawne lub niespójne dane grafowe"""


class ModelFormatError(GroveError, ValueError):
    """Nie da się sparsować kontenera modelu"""


class AttackError(GroveError, RuntimeError):
    """Błąd podczas ataku ekstrakcji"""


class OracleError(GroveError, RuntimeError):
    """Wyrocznia zapytań nie odpowiedziała poprawnie"""


class FingerprintError(GroveError, ValueError):
    """Błąd budowy danych lub weryfikacji odcisku"""


class RegistryError(GroveError, RuntimeError):
    """Błąd rejestru modeli lub sporu"""


class ExperimentError(GroveError, RuntimeError):
    """Błąd etapu eksperymentu"""
