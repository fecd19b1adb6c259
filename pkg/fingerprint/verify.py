"""
Werdykt: surogat, jeśli C_sim uzna za podobne więcej niż połowę par embeddingów z D_v
"""
import json
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Any, Optional

import numpy as np

from config.settings import Config
from core.exceptions import FingerprintError
from data.graph_dataset import GraphDataset
from gnn.model import GnnModel, forward
from .csim import SimilarityClassifier
from .distance import distance_matrix


class Verdict(str, Enum):
    SURROGATE = "surrogate"
    INDEPENDENT = "independent"


@dataclass
class VerdictReport:
    similar_fraction: float
    verdict: Verdict
    pair_count: int
    per_node_decisions: np.ndarray
    target_commitment: Optional[str] = None
    suspect_commitment: Optional[str] = None
    verification_digest: Optional[str] = None

    @property
    def is_surrogate(self) -> bool:
        return self.verdict is Verdict.SURROGATE

    def to_dict(self) -> Dict[str, Any]:
        return {
            "similar_fraction": self.similar_fraction,
            "verdict": self.verdict.value,
            "pair_count": self.pair_count,
            "per_node_decisions": [bool(d) for d in self.per_node_decisions],
            "target_commitment": self.target_commitment,
            "suspect_commitment": self.suspect_commitment,
            "verification_digest": self.verification_digest,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "VerdictReport":
        return cls(
            similar_fraction=float(payload["similar_fraction"]),
            verdict=Verdict(payload["verdict"]),
            pair_count=int(payload["pair_count"]),
            per_node_decisions=np.asarray(payload["per_node_decisions"], dtype=bool),
            target_commitment=payload.get("target_commitment"),
            suspect_commitment=payload.get("suspect_commitment"),
            verification_digest=payload.get("verification_digest"),
        )


def verdict_from_decisions(decisions: np.ndarray, threshold: float = Config.VERDICT_THRESHOLD) -> VerdictReport:
    decisions = np.asarray(decisions, dtype=bool)
    if decisions.size == 0:
        raise FingerprintError("no embedding pairs to decide on")
    fraction = float(decisions.mean())
    return VerdictReport(
        similar_fraction=fraction,
        verdict=Verdict.SURROGATE if fraction > threshold else Verdict.INDEPENDENT,
        pair_count=int(decisions.size),
        per_node_decisions=decisions,
    )


def verify_embeddings(csim: SimilarityClassifier, H_target: np.ndarray, H_suspect: np.ndarray) -> VerdictReport:
    """Werdykt z embeddingów już pobranych od obu modeli (węzeł po węźle)"""
    return verdict_from_decisions(csim.decide(distance_matrix(H_target, H_suspect)))


def verify(csim: SimilarityClassifier, target: GnnModel, suspect: GnnModel,
           graph: GraphDataset, d_v, seed: int = 0) -> VerdictReport:
    """Odpytaj oba modele na D_v i wydaj werdykt"""
    H_target, _ = forward(target, graph, d_v, seed)
    H_suspect, _ = forward(suspect, graph, d_v, seed)
    return verify_embeddings(csim, H_target, H_suspect)
