"""
Stan przekazywany między bramkami sporu
"""
from typing import List, Optional, TypedDict

import numpy as np

from attacks.oracle import QueryOracle
from data.graph_dataset import GraphDataset
from fingerprint.csim import SimilarityClassifier
from gnn.model import GnnModel
from .records import Dispute


class DisputeState(TypedDict, total=False):
    """Stan sporu w grafie bramek"""
    dispute: Dispute
    stage: str  # "open" albo "resolve"
    target_bytes: bytes
    suspect_bytes: bytes
    target_model: Optional[GnnModel]
    suspect_model: Optional[GnnModel]
    target_oracle: Optional[QueryOracle]  # wdrożenie F_t (domyślnie model z rejestru)
    suspect_oracle: Optional[QueryOracle]  # wdrożenie F_?
    graph: GraphDataset
    d_v: np.ndarray
    csim: SimilarityClassifier
    seed: int
    trace: List[str]  # kolejność wykonanych bramek
