"""
Kontrole sporu: poprawność budowy modelu i wierność wdrożenia względem rejestracji
"""
import logging
from typing import List, Tuple

import numpy as np
import torch

from attacks.oracle import QueryOracle
from config.settings import Config
from data.graph_dataset import GraphDataset
from gnn.layers import LAYER_TYPES
from gnn.model import GnnModel, full_forward
from .records import WellFormednessReport

logger = logging.getLogger(__name__)


def _layer_index(model: GnnModel, name: str) -> int:
    """Indeks warstwy dla nazwy parametru: warstwy GNN, potem głowica, potem transformacje wyjścia"""
    parts = name.split(".")
    if parts[0] == "layers":
        return int(parts[1])
    if parts[0] == "head":
        return model.config.num_layers
    if parts[0] == "post":
        return model.config.num_layers + 1 + int(parts[1])
    return -1


def check_well_formed(model: GnnModel) -> WellFormednessReport:
    """
    Model przechodzi, gdy składa się wyłącznie z rozpoznanych warstw (SAGE/GAT/GIN
    + gęsta głowica) o kształtach zgodnych z konfiguracją
    """
    findings: List[Tuple[int, str]] = []
    config = model.config
    expected_kind = LAYER_TYPES[config.architecture]
    reference = GnnModel(config, model.in_dim, model.num_classes)

    if len(model.layers) != config.num_layers:
        findings.append((len(model.layers), f"layer count {len(model.layers)} differs from config {config.num_layers}"))
    for index, layer in enumerate(model.layers):
        if type(layer) is not expected_kind:
            findings.append((index, f"unrecognized layer kind {type(layer).__name__}"))

    expected = {name: tuple(p.shape) for name, p in reference.named_parameters()}
    for name, param in model.named_parameters():
        index = _layer_index(model, name)
        if name.startswith("post."):
            continue
        if name not in expected:
            findings.append((index, f"unrecognized parameter {name}"))
        elif tuple(param.shape) != expected[name]:
            findings.append((index, f"shape mismatch in {name}: {tuple(param.shape)} vs {expected[name]}"))
        if not torch.isfinite(param).all():
            findings.append((index, f"non-finite values in {name}"))
    missing = set(expected) - {name for name, _ in model.named_parameters()}
    for name in sorted(missing):
        findings.append((_layer_index(model, name), f"missing parameter {name}"))

    for offset, transform in enumerate(model.post):
        findings.append((config.num_layers + 1 + offset, f"unrecognized output layer {type(transform).__name__}"))

    report = WellFormednessReport(tuple(findings))
    if not report.passed:
        logger.warning(f"Model nie przeszedł kontroli budowy: {report.describe()}")
    return report


def probe_nodes(d_v, size: int = Config.FIDELITY_PROBE_SIZE, seed: int = 0) -> np.ndarray:
    """Losowa (deterministyczna) próbka węzłów D_v do kontroli wierności"""
    d_v = np.asarray(d_v, dtype=np.int64)
    if d_v.size == 0:
        raise ValueError("verification set is empty")
    chosen = np.random.default_rng(seed).choice(d_v, size=min(size, d_v.size), replace=False)
    return np.sort(chosen)


def fidelity_check(registered: GnnModel, deployed_oracle: QueryOracle, graph: GraphDataset,
                   probe: np.ndarray, seed: int = 0,
                   tolerance: float = Config.FIDELITY_TOLERANCE) -> bool:
    """
    Wdrożony model musi zwracać dokładnie embeddingi zarejestrowanego modelu

    Wyrocznia jest odpytywana pełnym grafem z tym samym ziarnem próbkowania;
    porównywane są wiersze węzłów próbnych (max |różnica| <= tolerance).
    """
    probe = np.asarray(probe, dtype=np.int64)
    if probe.size == 0:
        raise ValueError("probe node set is empty")
    expected, _ = full_forward(registered, graph.adjacency, graph.features, seed)
    deployed = np.asarray(deployed_oracle.query(graph.features, graph.adjacency))
    if deployed.shape != expected.shape:
        logger.warning(f"Wdrożony model zwraca {deployed.shape}, zarejestrowany {expected.shape}")
        return False
    gap = float(np.max(np.abs(deployed[probe] - expected[probe])))
    logger.debug(f"Kontrola wierności: max |różnica| = {gap:.3g}")
    return gap <= tolerance
