"""
Estymacja struktury grafu z cech (graf k najbliższych sąsiadów) dla ataku Type II
"""
import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist

from core.exceptions import DatasetError

_BLOCK_ROWS = 1024


def knn_graph(features: np.ndarray, k: int) -> sp.csr_matrix:
    """
    Symetryczny graf kNN w metryce euklidesowej

    u-v są połączone, gdy v należy do k najbliższych u lub odwrotnie.
    Remisy rozstrzyga niższy indeks węzła; brak pętli własnych.
    """
    features = np.asarray(features, dtype=np.float64)
    n = features.shape[0]
    if k < 1 or k >= n:
        raise DatasetError(f"k out of range: need 1 <= k < {n}, got {k}")

    rows, cols = [], []
    for start in range(0, n, _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, n)
        distances = cdist(features[start:stop], features, metric="euclidean")
        distances[np.arange(stop - start), np.arange(start, stop)] = np.inf
        # stabilny sort zachowuje kolejność indeksów przy równych odległościach
        nearest = np.argsort(distances, axis=1, kind="stable")[:, :k]
        rows.append(np.repeat(np.arange(start, stop), k))
        cols.append(nearest.ravel())

    rows, cols = np.concatenate(rows), np.concatenate(cols)
    directed = sp.coo_matrix((np.ones(rows.size, dtype=np.float32), (rows, cols)), shape=(n, n)).tocsr()
    adjacency = directed.maximum(directed.T).tocsr()
    adjacency.data[:] = 1.0
    adjacency.sort_indices()
    return adjacency
