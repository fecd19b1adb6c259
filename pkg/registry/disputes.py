"""
Otwieranie i rozstrzyganie sporów o własność modelu
"""
import logging
from dataclasses import replace
from typing import Callable, List, Optional

import numpy as np

from attacks.oracle import QueryOracle
from core.exceptions import RegistryError
from data.graph_dataset import GraphDataset
from fingerprint.csim import SimilarityClassifier
from .records import Dispute, DisputeStatus, RegistryRecord
from .state import DisputeState
from .store import ModelRegistry

logger = logging.getLogger(__name__)

NodeHook = Callable[[str, DisputeState], None]


def _run(registry: ModelRegistry, state: DisputeState, hooks: Optional[List[NodeHook]]) -> DisputeState:
    from core.graph_builder import DisputeGraphBuilder

    graph = DisputeGraphBuilder(registry, on_node=hooks).build()
    return graph.invoke(state)


def open_dispute(registry: ModelRegistry, accuser: RegistryRecord, responder: RegistryRecord,
                 target_bytes: bytes, suspect_bytes: bytes,
                 hooks: Optional[List[NodeHook]] = None) -> Dispute:
    """
    Kroki 1-2: zgodność commitmentów i kolejność znaczników czasu

    Wynik: spór "opened" albo odrzucony z powodem (zapisany w dzienniku).
    """
    for record in (accuser, responder):
        if not registry.contains(record):
            raise RegistryError(f"record {record.model_id} is not in the registry")
    dispute = Dispute(registry.next_dispute_id(), accuser, responder)
    final = _run(registry, {
        "dispute": dispute,
        "stage": "open",
        "target_bytes": target_bytes,
        "suspect_bytes": suspect_bytes,
        "trace": [],
    }, hooks)
    dispute = registry.save_dispute(final["dispute"])
    logger.info(f"Spór {dispute.dispute_id}: {dispute.status.value} ({dispute.reason})")
    return dispute


def resolve(registry: ModelRegistry, dispute: Dispute, csim: SimilarityClassifier,
            graph: GraphDataset, d_v, seed: int = 0,
            target_oracle: Optional[QueryOracle] = None,
            suspect_oracle: Optional[QueryOracle] = None,
            verification_digest: Optional[str] = None,
            hooks: Optional[List[NodeHook]] = None) -> Dispute:
    """
    Kroki 3-5: poprawność budowy, wierność wdrożeń, weryfikacja odcisku

    Spór w stanie końcowym wraca bez zmian. Oracles to wdrożenia modeli
    (domyślnie modele z rejestru uruchomione w procesie).
    """
    if dispute.status is not DisputeStatus.OPENED:
        return dispute
    if verification_digest is not None:
        dispute = replace(dispute, verification_digest=verification_digest)
    final = _run(registry, {
        "dispute": dispute,
        "stage": "resolve",
        "graph": graph,
        "d_v": np.asarray(d_v, dtype=np.int64),
        "csim": csim,
        "seed": seed,
        "target_oracle": target_oracle,
        "suspect_oracle": suspect_oracle,
        "trace": [],
    }, hooks)
    resolved = final["dispute"]
    if resolved.status is DisputeStatus.OPENED:
        raise RegistryError(f"dispute {resolved.dispute_id} left the resolution workflow undecided")
    registry.save_dispute(resolved)
    logger.info(f"Spór {resolved.dispute_id}: {resolved.status.value} ({resolved.reason})")
    return resolved
