"""
Wyrocznie zapytań: czarna skrzynka zwracająca embeddingi modelu celu

Format przewodowy (JSON):
    żądanie:   {"features": [[float, ...], ...], "edges": [[u, v], ...], "seed": int}
               features - wiersze cech węzłów (n x d), edges - krawędzie nieskierowane
               indeksowane 0..n-1, seed - ziarno próbkowania sąsiadów
    odpowiedź: {"embeddings": [[float, ...], ...], "embedding_dim": int}
"""
import logging
import threading
from typing import Callable, Dict, Any, Optional, Protocol

import numpy as np
import requests
import scipy.sparse as sp

from config.settings import Config
from core.exceptions import OracleError
from gnn.model import GnnModel, full_forward

logger = logging.getLogger(__name__)


class QueryOracle(Protocol):
    """Interfejs zapytań do wdrożonego modelu (nigdy nie ujawnia wag)"""
    query_count: int

    def query(self, features: np.ndarray, adjacency: sp.csr_matrix) -> np.ndarray:
        ...


def adjacency_to_edges(adjacency: sp.spmatrix) -> np.ndarray:
    upper = sp.triu(sp.csr_matrix(adjacency), k=1).tocoo()
    return np.stack([upper.row, upper.col], axis=1).astype(np.int64)


def edges_to_adjacency(edges, node_count: int) -> sp.csr_matrix:
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size and (edges.min() < 0 or edges.max() >= node_count):
        raise OracleError("edge endpoint outside the submitted node set")
    data = np.ones(edges.shape[0], dtype=np.float32)
    adjacency = sp.coo_matrix((data, (edges[:, 0], edges[:, 1])), shape=(node_count, node_count)).tocsr()
    adjacency = adjacency.maximum(adjacency.T).tocsr()
    adjacency.setdiag(0)
    adjacency.eliminate_zeros()
    adjacency.data[:] = 1.0
    return adjacency


def encode_query(features: np.ndarray, adjacency: sp.spmatrix, seed: int) -> Dict[str, Any]:
    return {
        "features": np.asarray(features, dtype=np.float32).tolist(),
        "edges": adjacency_to_edges(adjacency).tolist(),
        "seed": int(seed),
    }


def decode_query(payload: Dict[str, Any]):
    """Zdekoduj żądanie -> (features, adjacency, seed)"""
    try:
        features = np.asarray(payload["features"], dtype=np.float32)
        if features.ndim != 2:
            raise ValueError("features must be a list of rows")
        adjacency = edges_to_adjacency(payload.get("edges", []), features.shape[0])
        return features, adjacency, int(payload.get("seed", 0))
    except (KeyError, TypeError, ValueError) as e:
        raise OracleError(f"malformed query: {e}")


def encode_response(embeddings: np.ndarray) -> Dict[str, Any]:
    return {"embeddings": np.asarray(embeddings, dtype=np.float32).tolist(), "embedding_dim": int(embeddings.shape[1])}


class InProcessOracle:
    """
    Wyrocznia nad modelem w tym samym procesie

    `transform` pozwala zasymulować wdrożenie, które przetwarza wyjście
    (np. liniowa transformacja embeddingów) - wykrywa to kontrola wierności.
    """

    def __init__(self, model: GnnModel, seed: int = 0,
                 transform: Optional[Callable[[np.ndarray], np.ndarray]] = None):
        self._model = model
        self.seed = seed
        self.transform = transform
        self.query_count = 0
        self._lock = threading.Lock()

    @property
    def embedding_dim(self) -> int:
        return self._model.embedding_dim

    def query(self, features: np.ndarray, adjacency: sp.csr_matrix) -> np.ndarray:
        embeddings, _ = full_forward(self._model, adjacency, features, self.seed)
        if self.transform is not None:
            embeddings = np.asarray(self.transform(embeddings), dtype=np.float32)
        with self._lock:
            self.query_count += int(features.shape[0])
        return embeddings


class HttpOracle:
    """Wyrocznia nad endpointem HTTP (np. POST /models/{id}/query rejestru)"""

    def __init__(self, url: str, seed: int = 0, timeout: float = Config.HTTP_TIMEOUT):
        self.url = url
        self.seed = seed
        self.timeout = timeout
        self.query_count = 0
        self._lock = threading.Lock()

    def query(self, features: np.ndarray, adjacency: sp.csr_matrix) -> np.ndarray:
        try:
            response = requests.post(self.url, json=encode_query(features, adjacency, self.seed), timeout=self.timeout)
            response.raise_for_status()
            payload = response.json()
            embeddings = np.asarray(payload["embeddings"], dtype=np.float32)
        except requests.RequestException as e:
            raise OracleError(f"oracle unreachable at {self.url}: {e}")
        except (KeyError, ValueError) as e:
            raise OracleError(f"malformed oracle response: {e}")
        if embeddings.ndim != 2 or embeddings.shape[0] != features.shape[0]:
            raise OracleError(f"oracle returned {embeddings.shape} for {features.shape[0]} nodes")
        with self._lock:
            self.query_count += int(features.shape[0])
        logger.debug(f"HTTP oracle {self.url}: {features.shape[0]} węzłów")
        return embeddings


def answer_query(model: GnnModel, payload: Dict[str, Any],
                 transform: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> Dict[str, Any]:
    """Obsłuż żądanie przewodowe modelem z rejestru (strona serwera)"""
    features, adjacency, seed = decode_query(payload)
    oracle = InProcessOracle(model, seed=seed, transform=transform)
    return encode_response(oracle.query(features, adjacency))
