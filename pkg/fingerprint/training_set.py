"""
Zbiór treningowy C_sim: wektory odległości par (cel, inny model) z pochodzeniem każdego wiersza
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from config.settings import Config
from core.exceptions import FingerprintError
from data.graph_dataset import GraphDataset
from gnn.model import GnnModel, forward
from gnn.pruning import prune
from .distance import DistanceVector, PairLabel, distance_matrix

logger = logging.getLogger(__name__)

PROVENANCE_COLUMNS = ["target_id", "other_id", "node_id", "kind"]

NamedModel = Tuple[str, GnnModel]
ModelList = Sequence[Union[GnnModel, NamedModel]]


class ModelKind(str, Enum):
    SURROGATE = "surrogate"
    INDEPENDENT = "independent"
    PRUNED_SURROGATE = "pruned-surrogate"


def named_models(models: ModelList, prefix: str) -> List[NamedModel]:
    """Nadaj identyfikatory modelom podanym bez nazwy"""
    named = []
    for i, item in enumerate(models):
        named.append(item if isinstance(item, tuple) else (f"{prefix}-{i}", item))
    return named


@dataclass
class FingerprintTrainingSet:
    """Wiersze (wektory odległości) + etykiety (1 = podobne) + pochodzenie"""
    features: np.ndarray
    labels: np.ndarray
    provenance: pd.DataFrame

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.provenance = self.provenance.reset_index(drop=True)
        if not (self.features.shape[0] == self.labels.shape[0] == len(self.provenance)):
            raise FingerprintError("rows, labels and provenance disagree on length")
        if self.provenance[PROVENANCE_COLUMNS].isna().any().any():
            raise FingerprintError("incomplete provenance")

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def embedding_dim(self) -> int:
        return int(self.features.shape[1])

    def counts(self) -> Dict[str, int]:
        positives = int(self.labels.sum())
        return {"positive": positives, "negative": len(self) - positives}

    def rows(self) -> List[DistanceVector]:
        return [
            DistanceVector(values, PairLabel.POSITIVE if label else PairLabel.NEGATIVE)
            for values, label in zip(self.features, self.labels)
        ]

    def merge(self, other: "FingerprintTrainingSet") -> "FingerprintTrainingSet":
        if len(self) and len(other) and self.embedding_dim != other.embedding_dim:
            raise FingerprintError(f"embedding dimension mismatch: {self.embedding_dim} vs {other.embedding_dim}")
        return FingerprintTrainingSet(
            np.vstack([self.features, other.features]),
            np.concatenate([self.labels, other.labels]),
            pd.concat([self.provenance, other.provenance], ignore_index=True),
        )

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.features, columns=[f"d{i}" for i in range(self.embedding_dim)])
        frame["label"] = self.labels
        for column in PROVENANCE_COLUMNS:
            frame[column] = self.provenance[column].to_numpy()
        return frame

    def to_csv(self, path: str) -> str:
        self.to_frame().to_csv(path, index=False)
        return path

    @classmethod
    def from_csv(cls, path: str) -> "FingerprintTrainingSet":
        frame = pd.read_csv(path, dtype={"target_id": str, "other_id": str, "kind": str})
        distance_columns = [c for c in frame.columns if c.startswith("d") and c[1:].isdigit()]
        distance_columns.sort(key=lambda c: int(c[1:]))
        return cls(frame[distance_columns].to_numpy(), frame["label"].to_numpy(), frame[PROVENANCE_COLUMNS])


def _block(target_id: str, other_id: str, kind: ModelKind, d_v: np.ndarray,
           H_target: np.ndarray, H_other: np.ndarray) -> FingerprintTrainingSet:
    label = 1 if kind in (ModelKind.SURROGATE, ModelKind.PRUNED_SURROGATE) else 0
    provenance = pd.DataFrame({
        "target_id": target_id,
        "other_id": other_id,
        "node_id": d_v,
        "kind": kind.value,
    })
    return FingerprintTrainingSet(distance_matrix(H_target, H_other), np.full(d_v.size, label), provenance)


def _embed_all(models: List[NamedModel], graph: GraphDataset, d_v: np.ndarray, seed: int, workers: int):
    return Parallel(n_jobs=workers, prefer="threads")(
        delayed(forward)(model, graph, d_v, seed) for _, model in models
    )


def build_training_set(target: GnnModel, surrogates: ModelList, independents: ModelList,
                       graph: GraphDataset, d_v, seed: int = 0, target_id: str = "target",
                       workers: int = 1) -> FingerprintTrainingSet:
    """
    |D_v| pozytywnych wierszy na surogat i |D_v| negatywnych na model niezależny

    Args:
        target: model celu F_t
        surrogates: surogaty (modele lub pary (id, model))
        independents: modele niezależne
        graph: pełny graf
        d_v: węzły weryfikacyjne
        seed: ziarno próbkowania sąsiadów przy odpytywaniu modeli
        workers: liczba wątków odpytujących modele kohorty
    """
    surrogates = named_models(surrogates, "surrogate")
    independents = named_models(independents, "independent")
    if not surrogates or not independents:
        raise FingerprintError("build_training_set needs at least one surrogate and one independent model")
    d_v = np.asarray(d_v, dtype=np.int64)

    H_target, _ = forward(target, graph, d_v, seed)
    cohort = surrogates + independents
    outputs = _embed_all(cohort, graph, d_v, seed, workers)
    kinds = [ModelKind.SURROGATE] * len(surrogates) + [ModelKind.INDEPENDENT] * len(independents)

    blocks = [
        _block(target_id, model_id, kind, d_v, H_target, H_other)
        for (model_id, _), kind, (H_other, _) in zip(cohort, kinds, outputs)
    ]
    training_set = blocks[0]
    for block in blocks[1:]:
        training_set = training_set.merge(block)
    logger.info(f"Zbiór treningowy C_sim: {training_set.counts()} dla {target_id}")
    return training_set


def build_robust_training_set(base: FingerprintTrainingSet, target: GnnModel, surrogates: ModelList,
                              prune_ratios: Sequence[float], graph: GraphDataset, d_v,
                              seed: int = 0, target_id: str = "target", workers: int = 1) -> FingerprintTrainingSet:
    """Zbiór bazowy + pozytywne wiersze z przyciętych wariantów surogatów"""
    prune_ratios = [float(r) for r in prune_ratios]
    for ratio in prune_ratios:
        if not 0.0 < ratio <= Config.MAX_ROBUST_PRUNE_RATIO:
            raise FingerprintError(
                f"robust prune ratio {ratio} outside (0, {Config.MAX_ROBUST_PRUNE_RATIO}]: "
                f"larger ratios cost the adversary too much accuracy"
            )
    if not prune_ratios:
        return base

    d_v = np.asarray(d_v, dtype=np.int64)
    H_target, _ = forward(target, graph, d_v, seed)
    variants = [
        (f"{model_id}@prune{ratio:g}", prune(model, ratio))
        for model_id, model in named_models(surrogates, "surrogate")
        for ratio in prune_ratios
    ]
    outputs = _embed_all(variants, graph, d_v, seed, workers)
    robust = base
    for (variant_id, _), (H_other, _) in zip(variants, outputs):
        robust = robust.merge(_block(target_id, variant_id, ModelKind.PRUNED_SURROGATE, d_v, H_target, H_other))
    logger.info(f"Rozszerzony zbiór C_sim: {robust.counts()} ({len(variants)} przyciętych wariantów)")
    return robust
