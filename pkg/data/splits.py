"""
Podział węzłów na D_t (cel), D_s (surogat), test i D_v (weryfikacja)
"""
import hashlib
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from config.settings import Config
from core.exceptions import DatasetError
from .graph_dataset import GraphDataset


@dataclass
class DataSplit:
    """Cztery rozłączne zbiory indeksów węzłów"""
    target_train: np.ndarray
    surrogate_train: np.ndarray
    test: np.ndarray
    verification: np.ndarray

    def parts(self) -> Dict[str, np.ndarray]:
        return {
            "target_train": self.target_train,
            "surrogate_train": self.surrogate_train,
            "test": self.test,
            "verification": self.verification,
        }

    def sizes(self) -> Tuple[int, int, int, int]:
        return tuple(int(part.size) for part in self.parts().values())

    def digest(self) -> str:
        """SHA-256 nad wszystkimi zbiorami (zapisywany w sporze jako dowód D_v)"""
        sha = hashlib.sha256()
        for key, part in self.parts().items():
            sha.update(key.encode("utf-8"))
            sha.update(np.asarray(part, dtype="<i8").tobytes())
        return sha.hexdigest()

    def to_dict(self) -> Dict[str, List[int]]:
        return {key: [int(i) for i in part] for key, part in self.parts().items()}

    @classmethod
    def from_dict(cls, payload: Dict[str, Sequence[int]]) -> "DataSplit":
        return cls(**{key: np.asarray(payload[key], dtype=np.int64) for key in
                      ("target_train", "surrogate_train", "test", "verification")})


def split_dataset(
    dataset: Union[GraphDataset, int],
    fractions: Sequence[float] = Config.SPLIT_FRACTIONS,
    seed: int = 0,
) -> DataSplit:
    """
    Losowy, deterministyczny podział węzłów

    Trzy pierwsze części dostają floor(f * n) węzłów, reszta trafia do D_v.

    Args:
        dataset: zbiór lub liczba węzłów
        fractions: udziały (target, surrogate, test, verification)
        seed: ziarno permutacji
    """
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 4:
        raise DatasetError("fractions must have exactly four entries")
    if any(f < 0 or f > 1 for f in fractions):
        raise DatasetError("fractions must be probabilities")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise DatasetError(f"fractions must sum to 1, got {sum(fractions)}")

    n = dataset if isinstance(dataset, int) else dataset.node_count
    order = np.random.default_rng(seed).permutation(n)
    sizes = [math.floor(f * n + 1e-9) for f in fractions[:3]]
    bounds = np.cumsum([0] + sizes)
    parts = [np.sort(order[bounds[i]:bounds[i + 1]]) for i in range(3)]
    parts.append(np.sort(order[bounds[3]:]))
    return DataSplit(*parts)
