"""
Wektory odległości: kwadraty różnic embeddingów element po elemencie (wejście C_sim)
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from core.exceptions import FingerprintError


class PairLabel(str, Enum):
    POSITIVE = "positive"  # podobne (cel vs surogat)
    NEGATIVE = "negative"  # niepodobne (cel vs model niezależny)

    @property
    def target(self) -> int:
        return 1 if self is PairLabel.POSITIVE else 0


@dataclass
class DistanceVector:
    values: np.ndarray
    label: Optional[PairLabel] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if np.any(self.values < 0):
            raise FingerprintError("distance vector entries must be nonnegative")


def _check_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise FingerprintError(f"embedding dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")


def distance_vector(h_a, h_b, label: Optional[PairLabel] = None) -> DistanceVector:
    """values[i] = (h_a[i] - h_b[i])^2"""
    h_a = np.asarray(h_a, dtype=np.float64).reshape(-1)
    h_b = np.asarray(h_b, dtype=np.float64).reshape(-1)
    _check_dims(h_a, h_b)
    return DistanceVector(np.square(h_a - h_b), label)


def distance_matrix(H_a: np.ndarray, H_b: np.ndarray) -> np.ndarray:
    """Wektory odległości dla par wierszy (węzeł po węźle)"""
    H_a = np.asarray(H_a, dtype=np.float64)
    H_b = np.asarray(H_b, dtype=np.float64)
    _check_dims(H_a, H_b)
    if H_a.shape[0] != H_b.shape[0]:
        raise FingerprintError(f"node count mismatch: {H_a.shape[0]} vs {H_b.shape[0]}")
    return np.square(H_a - H_b)


def euclidean_distances(H_a: np.ndarray, H_b: np.ndarray) -> np.ndarray:
    """Odległość euklidesowa per węzeł (histogramy diagnostyczne)"""
    return np.sqrt(distance_matrix(H_a, H_b).sum(axis=1))
