"""
Wspólne buildery dla testów: małe grafy, konfiguracje i wytrenowane modele
"""
import os
import sys

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np  # noqa: E402
import pytest  # noqa: E402
import scipy.sparse as sp  # noqa: E402

from attacks import AttackConfig, InProcessOracle, run_extraction  # noqa: E402
from data import GraphDataset, SyntheticGraphSpec, generate_synthetic, split_dataset  # noqa: E402
from fingerprint import build_training_set, train_csim  # noqa: E402
from gnn import GnnConfig, train  # noqa: E402


def path_graph(n: int = 3, feature_dim: int = 2) -> GraphDataset:
    """Ścieżka 0-1-...-(n-1) z cechami one-hot po parzystości"""
    rows = np.arange(n - 1)
    adjacency = sp.coo_matrix((np.ones(n - 1), (rows, rows + 1)), shape=(n, n))
    labels = np.arange(n) % 2
    features = np.zeros((n, feature_dim), dtype=np.float32)
    features[np.arange(n), labels % feature_dim] = 1.0
    return GraphDataset(adjacency, features, labels, 2, name="path")


def small_config(architecture: str = "GraphSAGE", **overrides) -> GnnConfig:
    params = {"hidden_dim": 8, "max_epochs": 5, "seed": 0, "batch_size": 64, "learning_rate": 0.01}
    params.update(overrides)
    return GnnConfig.for_architecture(architecture, **params)


@pytest.fixture
def tiny_path():
    return path_graph()


@pytest.fixture(scope="session")
def tiny_graph() -> GraphDataset:
    """Graf SBM: 2 klasy po 40 węzłów, wyraźnie rozdzielone cechy"""
    spec = SyntheticGraphSpec(nodes_per_class=40, num_classes=2, intra_edge_prob=0.15,
                              inter_edge_prob=0.01, feature_dim=8, feature_noise=0.3, seed=0)
    return generate_synthetic(spec)


@pytest.fixture(scope="session")
def tiny_split(tiny_graph):
    return split_dataset(tiny_graph, seed=0)


@pytest.fixture(scope="session")
def model_zoo(tiny_graph, tiny_split):
    """Cel, dwa surogaty i dwa modele niezależne trenowane na małym grafie"""
    target, _ = train(small_config(hidden_dim=16, max_epochs=40, seed=1), tiny_graph, tiny_split.target_train)
    ds = tiny_graph.subgraph(tiny_split.surrogate_train)
    surrogates = [
        run_extraction(InProcessOracle(target, seed=s), ds,
                       AttackConfig(attack_type=attack, epochs=40, seed=s, head_hidden=16,
                                    learning_rate=0.01)).model
        for s, attack in ((10, "TypeI"), (11, "TypeII"))
    ]
    independents = [
        train(small_config(arch, hidden_dim=16, max_epochs=40, seed=s), tiny_graph, tiny_split.surrogate_train)[0]
        for s, arch in ((20, "GraphSAGE"), (21, "GIN"))
    ]
    return {"target": target, "surrogates": surrogates, "independents": independents}


@pytest.fixture(scope="session")
def zoo_training_set(model_zoo, tiny_graph, tiny_split):
    return build_training_set(model_zoo["target"], model_zoo["surrogates"], model_zoo["independents"],
                              tiny_graph, tiny_split.verification, seed=0)


@pytest.fixture(scope="session")
def zoo_csim(zoo_training_set):
    return train_csim(zoo_training_set, seed=0, cv_folds=3)
