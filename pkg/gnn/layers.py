"""
Warstwy przekazywania wiadomości: GraphSAGE (średnia), GAT (uwaga wielogłowicowa), GIN (suma + MLP)

Agregacja idzie przez konwolucje torch_geometric; próbka sąsiadów (NeighborBlock)
jest zamieniana na edge_index z krawędziami sąsiad -> węzeł.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
import torch
import torch.nn.functional as F
from torch import nn
from torch_geometric.nn import GATConv, GINConv, SAGEConv

from config.settings import Config
from .config import Architecture


@dataclass
class NeighborBlock:
    """
    Próbka sąsiadów dla jednej warstwy

    index[v, j] to j-ty wylosowany sąsiad węzła v, mask[v, j] = 0 oznacza pusty slot
    (węzeł izolowany). Agregat pustego sąsiedztwa jest wektorem zerowym.
    """
    index: torch.Tensor
    mask: torch.Tensor

    @property
    def node_count(self) -> int:
        return int(self.index.shape[0])

    @property
    def sample_size(self) -> int:
        return int(self.index.shape[1])

    def permuted(self, order) -> "NeighborBlock":
        """Ta sama próbka z kolumnami w innej kolejności"""
        order = torch.as_tensor(order, dtype=torch.long)
        return NeighborBlock(self.index[:, order], self.mask[:, order])

    def edge_index(self) -> torch.Tensor:
        """Krawędzie [2, E] (źródło = sąsiad, cel = węzeł) w kolejności wierszy i slotów"""
        keep = self.mask > 0
        targets = torch.arange(self.node_count).unsqueeze(1).expand_as(self.index)
        return torch.stack([self.index[keep], targets[keep]])


def sample_neighbors(adjacency: sp.csr_matrix, sample_size: int, rng: np.random.Generator) -> NeighborBlock:
    """
    Wylosuj `sample_size` sąsiadów każdego węzła

    Stopień >= sample_size: losowanie bez zwracania. Stopień < sample_size: ze zwracaniem.
    """
    adjacency = sp.csr_matrix(adjacency)
    n = adjacency.shape[0]
    indptr, indices = adjacency.indptr, adjacency.indices
    degree = np.diff(indptr)
    index = np.zeros((n, sample_size), dtype=np.int64)
    mask = np.zeros((n, sample_size), dtype=np.float32)

    rows = np.repeat(np.arange(n), degree)
    keys = rng.random(rows.size)
    order = np.lexsort((keys, rows))
    rank = np.arange(rows.size) - indptr[rows]
    shuffled = indices[order]
    take = (rank < sample_size) & (degree[rows] >= sample_size)
    index[rows[take], rank[take]] = shuffled[take]
    mask[rows[take], rank[take]] = 1.0

    sparse_rows = np.flatnonzero((degree > 0) & (degree < sample_size))
    if sparse_rows.size:
        draws = (rng.random((sparse_rows.size, sample_size)) * degree[sparse_rows, None]).astype(np.int64)
        index[sparse_rows] = indices[indptr[sparse_rows, None] + draws]
        mask[sparse_rows] = 1.0

    return NeighborBlock(torch.from_numpy(index), torch.from_numpy(mask))


def generator_dropout(h: torch.Tensor, p: float, generator: Optional[torch.Generator]) -> torch.Tensor:
    """Dropout z jawnym generatorem (powtarzalny także przy treningu w wielu wątkach)"""
    if generator is None or p <= 0.0:
        return h
    keep = (torch.rand(h.shape, generator=generator) >= p).to(h.dtype)
    return h * keep / (1.0 - p)


class SageLayer(nn.Module):
    """h_v' = ReLU(W_l mean_u h_u + W_r h_v)"""

    kind = Architecture.SAGE

    def __init__(self, in_dim: int, out_dim: int):
        super().__init__()
        self.in_dim, self.out_dim = in_dim, out_dim
        self.conv = SAGEConv(in_dim, out_dim, aggr="mean", root_weight=True)

    def forward(self, h: torch.Tensor, block: NeighborBlock) -> torch.Tensor:
        return F.relu(self.conv(h, block.edge_index()))


class GatLayer(nn.Module):
    """
    Warstwa uwagi: dla każdej głowicy softmax po wylosowanych sąsiadach
    z LeakyReLU(a_dst^T W h_v + a_src^T W h_u); głowice są konkatenowane.
    Własny stan węzła wchodzi przez projekcję rezydualną, nie przez pętlę własną.
    """

    kind = Architecture.GAT

    def __init__(self, in_dim: int, out_dim: int, heads: int = 1, negative_slope: float = Config.GAT_NEGATIVE_SLOPE):
        super().__init__()
        if out_dim % heads:
            raise ValueError("out_dim must be divisible by heads")
        self.in_dim, self.out_dim, self.heads = in_dim, out_dim, heads
        self.conv = GATConv(in_dim, out_dim // heads, heads=heads, concat=True, negative_slope=negative_slope,
                            add_self_loops=False, residual=True)

    def attention(self, h: torch.Tensor, block: NeighborBlock) -> torch.Tensor:
        """Współczynniki uwagi [N, s, heads]; puste sloty mają wagę 0"""
        _, (_, alpha) = self.conv(h, block.edge_index(), return_attention_weights=True)
        coefficients = torch.zeros(block.node_count, block.sample_size, self.heads, dtype=alpha.dtype)
        coefficients[block.mask > 0] = alpha
        return coefficients

    def forward(self, h: torch.Tensor, block: NeighborBlock) -> torch.Tensor:
        return F.relu(self.conv(h, block.edge_index()))


class GinLayer(nn.Module):
    """h_v' = ReLU(MLP((1 + eps) h_v + sum_u h_u))"""

    kind = Architecture.GIN

    def __init__(self, in_dim: int, out_dim: int):
        super().__init__()
        self.in_dim, self.out_dim = in_dim, out_dim
        mlp = nn.Sequential(nn.Linear(in_dim, out_dim), nn.ReLU(), nn.Linear(out_dim, out_dim))
        self.conv = GINConv(mlp, eps=0.0, train_eps=True)

    @property
    def eps(self) -> torch.Tensor:
        return self.conv.eps

    @property
    def mlp(self) -> nn.Module:
        return self.conv.nn

    def forward(self, h: torch.Tensor, block: NeighborBlock) -> torch.Tensor:
        return F.relu(self.conv(h, block.edge_index()))


LAYER_TYPES = {
    Architecture.SAGE: SageLayer,
    Architecture.GAT: GatLayer,
    Architecture.GIN: GinLayer,
}


def layer_forward(arch, layer: nn.Module, h_prev: torch.Tensor, neighbors: NeighborBlock) -> torch.Tensor:
    """Jeden krok przekazywania wiadomości dla wskazanej architektury"""
    arch = Architecture.parse(arch)
    if not isinstance(layer, LAYER_TYPES[arch]):
        raise TypeError(f"{type(layer).__name__} is not a {arch.value} layer")
    if h_prev.shape[0] != neighbors.node_count:
        raise ValueError(f"h_prev has {h_prev.shape[0]} rows but the sampled block has {neighbors.node_count} nodes")
    return layer(h_prev, neighbors)
