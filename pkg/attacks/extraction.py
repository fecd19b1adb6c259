"""
Atak ekstrakcji modelu ukierunkowany na embeddingi (Type I / Type II) i podwójna ekstrakcja
"""
import logging
import time
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Callable, Dict, Any, List, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp
import torch
import torch.nn.functional as F
from torch import nn

from config.settings import Config
from core.exceptions import AttackError, OracleError
from data.graph_dataset import GraphDataset
from data.knn import knn_graph
from gnn.config import Architecture, GnnConfig
from gnn.model import GnnModel, build_model
from gnn.training import epoch_rng
from .oracle import InProcessOracle, QueryOracle

logger = logging.getLogger(__name__)

PhaseHook = Callable[[int, str, GnnModel], None]


class AttackType(str, Enum):
    TYPE_I = "TypeI"    # X_s, A_s, Y_s
    TYPE_II = "TypeII"  # X_s, Y_s; struktura z grafu kNN

    @classmethod
    def parse(cls, value) -> "AttackType":
        if isinstance(value, cls):
            return value
        normalized = str(value).replace("_", "").replace("-", "").replace(" ", "").lower()
        for member in cls:
            if normalized in (member.value.lower(), member.name.replace("_", "").lower()):
                return member
        raise ValueError(f"unknown attack type: {value}")


@dataclass
class AttackConfig:
    """Parametry ataku (domyślnie hiperparametry treningu GNN)"""
    attack_type: AttackType = AttackType.TYPE_I
    knn_k: int = Config.KNN_K
    epochs: int = Config.MAX_EPOCHS
    learning_rate: float = Config.LEARNING_RATE
    surrogate_architecture: Architecture = Architecture.SAGE
    seed: int = 0
    head_hidden: int = Config.SURROGATE_HEAD_HIDDEN
    batch_size: int = Config.BATCH_SIZE

    def __post_init__(self):
        self.attack_type = AttackType.parse(self.attack_type)
        self.surrogate_architecture = Architecture.parse(self.surrogate_architecture)
        self.validate()

    def validate(self) -> None:
        if self.attack_type is AttackType.TYPE_II and self.knn_k < 1:
            raise ValueError("TypeII requires knn_k >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")

    def replace(self, **changes) -> "AttackConfig":
        payload = self.to_dict()
        payload.update(changes)
        return AttackConfig(**payload)

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["attack_type"] = self.attack_type.value
        payload["surrogate_architecture"] = self.surrogate_architecture.value
        return payload


@dataclass
class SurrogateModel:
    """Surogat: sieć embeddingów dopasowana do celu + klasyfikator MLP"""
    model: GnnModel
    attack_config: AttackConfig
    embedding_losses: List[float] = field(default_factory=list)
    classifier_losses: List[float] = field(default_factory=list)
    query_count: int = 0
    wall_time_seconds: float = 0.0

    @property
    def gnn(self) -> nn.ModuleList:
        return self.model.layers

    @property
    def classifier(self) -> nn.Module:
        return self.model.head

    @property
    def embedding_dim(self) -> int:
        return self.model.embedding_dim

    def summary(self) -> Dict[str, Any]:
        return {
            "attack": self.attack_config.to_dict(),
            "final_embedding_loss": self.embedding_losses[-1] if self.embedding_losses else None,
            "final_classifier_loss": self.classifier_losses[-1] if self.classifier_losses else None,
            "query_count": self.query_count,
            "wall_time_seconds": self.wall_time_seconds,
        }


def row_21_loss(H_s: Union[np.ndarray, torch.Tensor], H_t: Union[np.ndarray, torch.Tensor]):
    """
    L_R = (1/n) * sum_i ||H_s[i] - H_t[i]||_2

    Tensory torch -> tensor (różniczkowalny), tablice numpy -> float.
    """
    if tuple(H_s.shape) != tuple(H_t.shape):
        raise ValueError(f"shape mismatch: {tuple(H_s.shape)} vs {tuple(H_t.shape)}")
    if isinstance(H_s, torch.Tensor) or isinstance(H_t, torch.Tensor):
        H_s, H_t = torch.as_tensor(H_s), torch.as_tensor(H_t)
        return torch.linalg.vector_norm(H_s - H_t, dim=1).sum() / max(H_s.shape[0], 1)
    diff = np.asarray(H_s, dtype=np.float64) - np.asarray(H_t, dtype=np.float64)
    return float(np.linalg.norm(diff, axis=1).sum() / max(diff.shape[0], 1))


def attack_structure(ds: GraphDataset, cfg: AttackConfig) -> sp.csr_matrix:
    """Struktura widziana przez atakującego: A_s (Type I) albo graf kNN z X_s (Type II)"""
    if cfg.attack_type is AttackType.TYPE_I:
        return ds.adjacency
    return knn_graph(ds.features, cfg.knn_k)


def query_target(oracle: QueryOracle, ds: GraphDataset, structure: sp.csr_matrix) -> np.ndarray:
    """H_t dla całego zbioru atakującego (budżet zapytań = cały D_s)"""
    try:
        embeddings = np.asarray(oracle.query(ds.features, structure), dtype=np.float32)
    except OracleError:
        raise
    except Exception as e:
        raise OracleError(f"oracle failure: {e}")
    if embeddings.ndim != 2 or embeddings.shape[0] != ds.node_count:
        raise OracleError(f"oracle returned embeddings of shape {embeddings.shape} for {ds.node_count} nodes")
    if not np.all(np.isfinite(embeddings)):
        raise OracleError("oracle returned non-finite embeddings")
    return embeddings


def surrogate_config(cfg: AttackConfig, embedding_dim: int) -> GnnConfig:
    """Konfiguracja surogatu: szerokość embeddingu wymuszona przez odpowiedzi celu"""
    return GnnConfig.for_architecture(
        cfg.surrogate_architecture,
        hidden_dim=embedding_dim,
        learning_rate=cfg.learning_rate,
        max_epochs=cfg.epochs,
        early_stop_patience=None,
        seed=cfg.seed,
        head_hidden=cfg.head_hidden,
        batch_size=cfg.batch_size,
    )


def prepare_attack(oracle: QueryOracle, ds: GraphDataset, cfg: AttackConfig) -> Tuple[sp.csr_matrix, np.ndarray, GnnModel]:
    if ds.node_count == 0:
        raise AttackError("empty surrogate split")
    structure = attack_structure(ds, cfg)
    H_t = query_target(oracle, ds, structure)
    model = build_model(surrogate_config(cfg, H_t.shape[1]), ds.feature_dim, ds.num_classes)
    return structure, H_t, model


def classifier_step(model: GnnModel, optimizer: torch.optim.Optimizer, embeddings: torch.Tensor,
                    labels: torch.Tensor, batches) -> float:
    """Aktualizacja samej głowicy na zamrożonych embeddingach"""
    losses = []
    for batch in batches:
        index = torch.from_numpy(batch)
        optimizer.zero_grad()
        loss = F.cross_entropy(model.head(embeddings[index]), labels[index])
        loss.backward()
        optimizer.step()
        losses.append(float(loss.detach()))
    return float(np.mean(losses))


def node_batches(count: int, batch_size: int, rng: np.random.Generator):
    order = rng.permutation(count)
    return [order[i:i + batch_size] for i in range(0, count, batch_size)]


def run_extraction(oracle: QueryOracle, ds: GraphDataset, cfg: AttackConfig,
                   on_phase: Optional[PhaseHook] = None) -> SurrogateModel:
    """
    Wytrenuj surogat na zbiorze atakującego D_s

    W każdej epoce najpierw sieć embeddingów minimalizuje L_R względem H_t
    (głowica stoi), potem głowica uczy się na Y_s przy zamrożonej sieci.

    Args:
        oracle: wyrocznia modelu celu
        ds: podgraf D_s (indeksy 0..n_s-1)
        cfg: konfiguracja ataku
        on_phase: hook(epoch, phase, model) wołany po fazach "init", "embedding", "classifier"
    """
    started = time.perf_counter()
    structure, H_t, model = prepare_attack(oracle, ds, cfg)
    x = torch.from_numpy(ds.features)
    y = torch.from_numpy(ds.labels)
    target = torch.from_numpy(H_t)
    gnn_optimizer = torch.optim.Adam(model.layers.parameters(), lr=cfg.learning_rate)
    head_optimizer = torch.optim.Adam(model.head.parameters(), lr=cfg.learning_rate)
    generator = torch.Generator().manual_seed(int(cfg.seed))
    surrogate = SurrogateModel(model=model, attack_config=cfg, query_count=ds.node_count)
    if on_phase:
        on_phase(-1, "init", model)

    for epoch in range(cfg.epochs):
        rng = epoch_rng(cfg.seed, epoch)
        blocks = model.sample_blocks(structure, rng)
        batches = node_batches(ds.node_count, cfg.batch_size, rng)

        losses = []
        for batch in batches:
            index = torch.from_numpy(batch)
            gnn_optimizer.zero_grad()
            embeddings = model.embed(x, blocks, generator=generator)
            loss = row_21_loss(embeddings[index], target[index])
            loss.backward()
            gnn_optimizer.step()
            losses.append(float(loss.detach()))
        surrogate.embedding_losses.append(float(np.mean(losses)))
        if on_phase:
            on_phase(epoch, "embedding", model)

        with torch.no_grad():
            frozen = model.embed(x, blocks)
        surrogate.classifier_losses.append(classifier_step(model, head_optimizer, frozen, y, batches))
        if on_phase:
            on_phase(epoch, "classifier", model)
        logger.debug(
            f"ekstrakcja epoka {epoch}: L_R={surrogate.embedding_losses[-1]:.4f} "
            f"CE={surrogate.classifier_losses[-1]:.4f}"
        )

    surrogate.wall_time_seconds = time.perf_counter() - started
    logger.info(
        f"Ekstrakcja {cfg.attack_type.value} ({cfg.surrogate_architecture.value}): "
        f"L_R={surrogate.embedding_losses[-1]:.4f}, {surrogate.query_count} zapytań, "
        f"{surrogate.wall_time_seconds:.1f}s"
    )
    return surrogate


def double_extract(oracle_on_surrogate: QueryOracle, ds: GraphDataset, cfg: AttackConfig) -> SurrogateModel:
    """Drugi etap: ekstrakcja z surogatu F_s (ten sam typ ataku co w pierwszym etapie)"""
    return run_extraction(oracle_on_surrogate, ds, cfg)


def chain_extraction(target_oracle: QueryOracle, ds: GraphDataset, cfg: AttackConfig,
                     second_ds: Optional[GraphDataset] = None) -> Tuple[SurrogateModel, SurrogateModel]:
    """F_t -> F_s -> F_{s^2}: obie ekstrakcje tym samym typem ataku"""
    first = run_extraction(target_oracle, ds, cfg)
    second = double_extract(InProcessOracle(first.model, seed=cfg.seed), second_ds or ds, cfg.replace(seed=cfg.seed + 1))
    return first, second
