"""
Zbiór danych grafowych D = (A, X, Y) oraz jego zapis/odczyt z dysku
"""
import logging
import os
from dataclasses import dataclass
from typing import Dict, Any, Sequence

import numpy as np
import pandas as pd
import scipy.sparse as sp

from core.exceptions import DatasetError

logger = logging.getLogger(__name__)

EDGES_FILE = "edges.tsv"
FEATURES_FILE = "features.csv"
LABELS_FILE = "labels.csv"


def _symmetrize(adjacency: sp.spmatrix) -> sp.csr_matrix:
    """Symetryczna, binarna macierz sąsiedztwa bez pętli własnych"""
    adjacency = sp.csr_matrix(adjacency)
    adjacency = adjacency.maximum(adjacency.T).tocsr()
    adjacency.setdiag(0)
    adjacency.eliminate_zeros()
    adjacency.data = np.ones_like(adjacency.data, dtype=np.float32)
    adjacency.sort_indices()
    return adjacency


@dataclass
class GraphDataset:
    """Graf z cechami i etykietami węzłów"""
    adjacency: sp.csr_matrix
    features: np.ndarray
    labels: np.ndarray
    num_classes: int
    name: str = "graph"

    def __post_init__(self):
        self.adjacency = _symmetrize(self.adjacency)
        self.features = np.ascontiguousarray(self.features, dtype=np.float32)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.validate()

    @property
    def node_count(self) -> int:
        return int(self.features.shape[0])

    @property
    def feature_dim(self) -> int:
        return int(self.features.shape[1])

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.nnz // 2)

    def validate(self) -> None:
        """Sprawdź niezmienniki zbioru"""
        n = self.features.shape[0]
        if self.features.ndim != 2:
            raise DatasetError("features must be a 2-D matrix")
        if self.adjacency.shape != (n, n):
            raise DatasetError(f"adjacency shape {self.adjacency.shape} does not match node_count {n}")
        if self.labels.shape != (n,):
            raise DatasetError(f"labels length {self.labels.shape[0]} does not match node_count {n}")
        if n and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise DatasetError(f"labels must lie in [0, {self.num_classes})")

    def neighbors(self, node: int) -> np.ndarray:
        """Sąsiedzi N(v)"""
        start, end = self.adjacency.indptr[node], self.adjacency.indptr[node + 1]
        return self.adjacency.indices[start:end]

    def edge_list(self) -> np.ndarray:
        """Krawędzie (u, v) z u < v"""
        upper = sp.triu(self.adjacency, k=1).tocoo()
        return np.stack([upper.row, upper.col], axis=1).astype(np.int64)

    def subgraph(self, nodes: Sequence[int]) -> "GraphDataset":
        """Podgraf indukowany z nowymi indeksami 0..len(nodes)-1 (trening indukcyjny)"""
        nodes = np.asarray(nodes, dtype=np.int64)
        if nodes.size and (nodes.min() < 0 or nodes.max() >= self.node_count):
            raise DatasetError("subgraph nodes outside the node set")
        return GraphDataset(
            adjacency=self.adjacency[nodes][:, nodes],
            features=self.features[nodes],
            labels=self.labels[nodes],
            num_classes=self.num_classes,
            name=f"{self.name}[{nodes.size}]",
        )

    def with_adjacency(self, adjacency: sp.spmatrix) -> "GraphDataset":
        """Ten sam zbiór z inną strukturą (np. graf kNN w ataku Type II)"""
        return GraphDataset(adjacency, self.features, self.labels, self.num_classes, name=f"{self.name}~knn")

    def homophily(self) -> float:
        """Odsetek krawędzi łączących węzły tej samej klasy"""
        edges = self.edge_list()
        if edges.size == 0:
            return 0.0
        return float(np.mean(self.labels[edges[:, 0]] == self.labels[edges[:, 1]]))

    def summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "nodes": self.node_count,
            "edges": self.edge_count,
            "features": self.feature_dim,
            "classes": self.num_classes,
        }


def _require(path: str) -> str:
    if not os.path.exists(path):
        raise DatasetError(f"missing file: {path}")
    return path


def load_dataset(path: str, name: str = None) -> GraphDataset:
    """
    Wczytaj zbiór z katalogu `<name>/edges.tsv`, `features.csv`, `labels.csv`

    Args:
        path: katalog zbioru
        name: nazwa (domyślnie nazwa katalogu)

    Returns:
        Zwalidowany GraphDataset z symetryczną macierzą sąsiedztwa
    """
    features = pd.read_csv(_require(os.path.join(path, FEATURES_FILE)), header=None).to_numpy(dtype=np.float32)
    raw_labels = pd.read_csv(_require(os.path.join(path, LABELS_FILE)), header=None).iloc[:, 0]
    edges_path = _require(os.path.join(path, EDGES_FILE))

    numeric_labels = pd.to_numeric(raw_labels, errors="coerce")
    if numeric_labels.isna().any() or not np.all(np.mod(numeric_labels.to_numpy(), 1) == 0):
        raise DatasetError("non-integer label in labels file")
    labels = numeric_labels.to_numpy().astype(np.int64)

    n = features.shape[0]
    if labels.shape[0] != n:
        raise DatasetError(f"labels ({labels.shape[0]}) and features ({n}) disagree on node count")

    edge_array = np.zeros((0, 2), dtype=np.int64)
    if os.path.getsize(edges_path) > 0:
        try:
            edges = pd.read_csv(edges_path, sep="\t", header=None, dtype=str)
        except pd.errors.ParserError as e:
            raise DatasetError(f"malformed edges file: {e}")
        if edges.shape[1] != 2:
            raise DatasetError(f"edges file must have 2 tab-separated columns, got {edges.shape[1]}")
        ids = edges.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=np.float64)
        if np.isnan(ids).any() or np.any(np.mod(ids, 1) != 0):
            raise DatasetError("non-integer node id in edges file")
        edge_array = ids.astype(np.int64)
    bad = edge_array[(edge_array < 0) | (edge_array >= n)]
    if bad.size:
        raise DatasetError(f"unknown node id {int(bad[0])} in edges file ({n} nodes have features)")

    adjacency = sp.coo_matrix(
        (np.ones(edge_array.shape[0], dtype=np.float32), (edge_array[:, 0], edge_array[:, 1])),
        shape=(n, n),
    )
    num_classes = int(labels.max()) + 1 if n else 0
    dataset = GraphDataset(adjacency, features, labels, num_classes, name=name or os.path.basename(os.path.normpath(path)))
    logger.info(f"Wczytano zbiór {dataset.summary()}")
    return dataset


def save_dataset(dataset: GraphDataset, path: str) -> str:
    """Zapisz zbiór w układzie katalogu `<name>/`"""
    os.makedirs(path, exist_ok=True)
    pd.DataFrame(dataset.edge_list()).to_csv(os.path.join(path, EDGES_FILE), sep="\t", header=False, index=False)
    pd.DataFrame(dataset.features).to_csv(os.path.join(path, FEATURES_FILE), header=False, index=False)
    pd.DataFrame(dataset.labels).to_csv(os.path.join(path, LABELS_FILE), header=False, index=False)
    return path
