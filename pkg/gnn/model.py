"""
Model GNN: stos warstw przekazywania wiadomości + głowica klasyfikatora
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
import torch
from torch import nn

from data.graph_dataset import GraphDataset
from .config import Architecture, GnnConfig
from .layers import GatLayer, GinLayer, NeighborBlock, SageLayer, generator_dropout, layer_forward, sample_neighbors

logger = logging.getLogger(__name__)


def _build_layers(config: GnnConfig, in_dim: int) -> nn.ModuleList:
    layers = nn.ModuleList()
    for depth in range(config.num_layers):
        layer_in = in_dim if depth == 0 else config.hidden_dim
        if config.architecture is Architecture.SAGE:
            layers.append(SageLayer(layer_in, config.hidden_dim))
        elif config.architecture is Architecture.GAT:
            # głowice tylko w warstwach ukrytych, ostatnia warstwa ma jedną głowicę
            heads = config.attention_heads if depth < config.num_layers - 1 else 1
            layers.append(GatLayer(layer_in, config.hidden_dim, heads=heads))
        else:
            layers.append(GinLayer(layer_in, config.hidden_dim))
    return layers


def _build_head(config: GnnConfig, num_classes: int) -> nn.Module:
    if config.head_hidden > 0:
        return nn.Sequential(
            nn.Linear(config.hidden_dim, config.head_hidden),
            nn.ReLU(),
            nn.Linear(config.head_hidden, num_classes),
        )
    return nn.Linear(config.hidden_dim, num_classes)


class GnnModel(nn.Module):
    """
    F: (A, X) -> H oraz klasyfikator H -> logity

    `post` przechowuje dodatkowe transformacje wyjścia (nie są częścią żadnej
    standardowej architektury; kontrola poprawności budowy zgłasza je jako znalezisko).
    """

    def __init__(self, config: GnnConfig, in_dim: int, num_classes: int):
        super().__init__()
        self.config = config
        self.in_dim = in_dim
        self.num_classes = num_classes
        self.layers = _build_layers(config, in_dim)
        self.head = _build_head(config, num_classes)
        self.post = nn.ModuleList()

    @property
    def embedding_dim(self) -> int:
        return self.config.hidden_dim

    def sample_blocks(self, adjacency: sp.csr_matrix, rng: np.random.Generator) -> List[NeighborBlock]:
        return [sample_neighbors(adjacency, size, rng) for size in self.config.neighbor_samples]

    def embed(self, features: torch.Tensor, blocks: Sequence[NeighborBlock],
              generator: Optional[torch.Generator] = None) -> torch.Tensor:
        h = features
        for depth, (layer, block) in enumerate(zip(self.layers, blocks)):
            if depth > 0:
                h = generator_dropout(h, self.config.dropout, generator)
            h = layer_forward(self.config.architecture, layer, h, block)
        for transform in self.post:
            h = transform(h)
        return h

    def forward(self, features: torch.Tensor, blocks: Sequence[NeighborBlock],
                generator: Optional[torch.Generator] = None) -> Tuple[torch.Tensor, torch.Tensor]:
        embeddings = self.embed(features, blocks, generator)
        return embeddings, self.head(embeddings)

    def attention(self, features: torch.Tensor, blocks: Sequence[NeighborBlock]) -> List[torch.Tensor]:
        """Współczynniki uwagi każdej warstwy GAT"""
        if self.config.architecture is not Architecture.GAT:
            raise ValueError("attention coefficients exist only for GAT models")
        coefficients, h = [], features
        with torch.no_grad():
            for layer, block in zip(self.layers, blocks):
                coefficients.append(layer.attention(h, block))
                h = layer(h, block)
        return coefficients


def init_parameters(model: nn.Module, seed: int) -> nn.Module:
    """Inicjalizacja Glorota z jawnego generatora; biasy i eps zerowe"""
    generator = torch.Generator().manual_seed(int(seed))
    with torch.no_grad():
        for name, param in model.named_parameters():
            if param.ndim >= 2:
                fan_out, fan_in = param.shape[0], int(np.prod(param.shape[1:]))
                bound = math.sqrt(6.0 / (fan_in + fan_out))
                param.uniform_(-bound, bound, generator=generator)
            else:
                param.zero_()
    return model


def build_model(config: GnnConfig, in_dim: int, num_classes: int) -> GnnModel:
    """Nowy model z deterministyczną inicjalizacją wag (ziarno z konfiguracji)"""
    return init_parameters(GnnModel(config, in_dim, num_classes), config.seed)


def _check_nodes(graph: GraphDataset, nodes) -> np.ndarray:
    nodes = np.asarray(nodes, dtype=np.int64).reshape(-1)
    if nodes.size == 0:
        raise ValueError("empty node set")
    if nodes.min() < 0 or nodes.max() >= graph.node_count:
        raise ValueError("nodes outside the graph node set")
    return nodes


def full_forward(model: GnnModel, adjacency: sp.csr_matrix, features: np.ndarray, seed: int):
    """Embeddingi i logity wszystkich węzłów grafu (bez dropoutu, bez gradientu)"""
    blocks = model.sample_blocks(adjacency, np.random.default_rng(seed))
    x = torch.from_numpy(np.ascontiguousarray(features, dtype=np.float32))
    with torch.no_grad():
        embeddings, logits = model(x, blocks)
    return embeddings.numpy(), logits.numpy()


def forward(model: GnnModel, graph: GraphDataset, nodes, seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Embeddingi ostatniej warstwy ukrytej i logity dla wskazanych węzłów

    Próbkowanie sąsiadów jest deterministyczne dla danego ziarna.
    """
    nodes = _check_nodes(graph, nodes)
    embeddings, logits = full_forward(model, graph.adjacency, graph.features, seed)
    return embeddings[nodes], logits[nodes]


def predict_labels(model: GnnModel, graph: GraphDataset, nodes, seed: int = 0) -> np.ndarray:
    _, logits = forward(model, graph, nodes, seed)
    return logits.argmax(axis=1)


def evaluate(model: GnnModel, graph: GraphDataset, nodes, seed: int = 0) -> float:
    """Dokładność na zbiorze węzłów"""
    nodes = _check_nodes(graph, nodes)
    return float(np.mean(predict_labels(model, graph, nodes, seed) == graph.labels[nodes]))
