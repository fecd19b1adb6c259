"""
Testy danych grafowych: wczytywanie, podział, generator SBM, graf kNN
"""
import numpy as np
import pytest
from scipy.spatial.distance import cdist

from core.exceptions import DatasetError
from data import (
    SyntheticGraphSpec,
    generate_synthetic,
    knn_graph,
    load_dataset,
    resolve_dataset,
    save_dataset,
    split_dataset
)


def _write_dataset(root, edges, n_nodes, feature_dim=3, labels=None):
    root.mkdir(parents=True, exist_ok=True)
    (root / "edges.tsv").write_text("".join(f"{u}\t{v}\n" for u, v in edges))
    (root / "features.csv").write_text(
        "".join(",".join(str(float(i + j)) for j in range(feature_dim)) + "\n" for i in range(n_nodes))
    )
    labels = labels if labels is not None else [i % 2 for i in range(n_nodes)]
    (root / "labels.csv").write_text("".join(f"{y}\n" for y in labels))
    return str(root)


def test_load_path_graph(tmp_path):
    """Test wczytania ścieżki 0-1-2"""
    print("🧪 Test load_dataset...")
    ds = load_dataset(_write_dataset(tmp_path / "path", [(0, 1), (1, 2)], 3))

    assert ds.node_count == 3
    dense = ds.adjacency.toarray()
    assert dense[0, 1] == dense[1, 0] == 1
    assert dense[1, 2] == dense[2, 1] == 1
    assert dense[0, 2] == 0
    assert ds.edge_count == 2
    assert np.all(np.diag(dense) == 0)
    print("✅ load_dataset OK")


def test_load_rejects_unknown_node(tmp_path):
    path = _write_dataset(tmp_path / "bad", [(0, 99)], 10)
    with pytest.raises(DatasetError, match="unknown node id"):
        load_dataset(path)


def test_load_rejects_fractional_node_id(tmp_path):
    path = _write_dataset(tmp_path / "fraction", [(0, 1.5)], 3)
    with pytest.raises(DatasetError, match="non-integer node id"):
        load_dataset(path)


@pytest.mark.parametrize("content, message", [
    ("0\t1\t2\n1\t2\t0\n", "2 tab-separated columns"),
    ("0\n1\n", "2 tab-separated columns"),
    ("0\t1\n1\t2\t0\n", "malformed edges file"),
])
def test_load_rejects_wrong_edge_columns(tmp_path, content, message):
    path = _write_dataset(tmp_path / "columns", [], 3)
    (tmp_path / "columns" / "edges.tsv").write_text(content)
    with pytest.raises(DatasetError, match=message):
        load_dataset(path)


def test_load_rejects_non_integer_label(tmp_path):
    path = _write_dataset(tmp_path / "labels", [(0, 1)], 3, labels=["0", "x", "1"])
    with pytest.raises(DatasetError, match="non-integer label"):
        load_dataset(path)


def test_load_rejects_missing_file(tmp_path):
    path = _write_dataset(tmp_path / "missing", [(0, 1)], 3)
    (tmp_path / "missing" / "labels.csv").unlink()
    with pytest.raises(DatasetError):
        load_dataset(path)


def test_save_and_load_preserve_graph(tmp_path, tiny_graph):
    path = save_dataset(tiny_graph, str(tmp_path / "tiny"))
    loaded = load_dataset(path)

    assert loaded.node_count == tiny_graph.node_count
    assert (loaded.adjacency != tiny_graph.adjacency).nnz == 0
    assert np.allclose(loaded.features, tiny_graph.features)
    assert np.array_equal(loaded.labels, tiny_graph.labels)


@pytest.mark.parametrize("n, expected", [
    (10, (4, 4, 1, 1)),
    (3025, (1210, 1210, 302, 303)),
])
def test_split_sizes(n, expected):
    """Test rozmiarów podziału"""
    print("\n🧪 Test split_dataset...")
    split = split_dataset(n, seed=7)
    assert split.sizes() == expected
    print("✅ split_dataset OK")


def test_split_is_deterministic():
    a, b = split_dataset(50, seed=3), split_dataset(50, seed=3)
    for key in a.parts():
        assert np.array_equal(a.parts()[key], b.parts()[key])
    assert a.digest() == b.digest()


def test_split_parts_disjoint_over_many_seeds():
    for seed in range(100):
        split = split_dataset(37, seed=seed)
        parts = list(split.parts().values())
        union = np.concatenate(parts)
        assert union.size == 37
        assert np.unique(union).size == 37


def test_split_rejects_bad_fractions():
    with pytest.raises(DatasetError, match="sum to 1"):
        split_dataset(10, fractions=(0.5, 0.5, 0.1, 0.1))
    with pytest.raises(DatasetError):
        split_dataset(10, fractions=(0.5, 0.5, 0.0))


def test_split_round_trip_through_dict():
    split = split_dataset(20, seed=1)
    restored = type(split).from_dict(split.to_dict())
    assert restored.digest() == split.digest()


def test_synthetic_intra_density():
    """Test gęstości krawędzi wewnątrz klas"""
    print("\n🧪 Test generate_synthetic...")
    ds = generate_synthetic(SyntheticGraphSpec(nodes_per_class=50, num_classes=2, intra_edge_prob=0.2,
                                               inter_edge_prob=0.01, feature_dim=4, seed=0))
    dense = ds.adjacency.toarray()
    same = ds.labels[:, None] == ds.labels[None, :]
    upper = np.triu(np.ones_like(dense, dtype=bool), k=1)
    intra_density = dense[same & upper].mean()
    inter_density = dense[~same & upper].mean()

    assert abs(intra_density - 0.2) <= 0.05
    assert inter_density < 0.05
    print("✅ generate_synthetic OK")


def test_synthetic_zero_noise_gives_identical_class_rows():
    ds = generate_synthetic(SyntheticGraphSpec(nodes_per_class=10, num_classes=3, feature_noise=0.0,
                                               feature_dim=5, seed=1))
    for c in range(3):
        rows = ds.features[ds.labels == c]
        assert np.all(rows == rows[0])


def test_synthetic_is_deterministic():
    spec = SyntheticGraphSpec(nodes_per_class=20, num_classes=2, seed=5, intra_edge_prob=0.1, inter_edge_prob=0.01)
    a, b = generate_synthetic(spec), generate_synthetic(spec)
    assert (a.adjacency != b.adjacency).nnz == 0
    assert np.array_equal(a.features, b.features)


def test_synthetic_rejects_heterophilous_spec():
    with pytest.raises(DatasetError):
        generate_synthetic(SyntheticGraphSpec(intra_edge_prob=0.01, inter_edge_prob=0.1))


def test_resolve_named_dataset():
    ds = resolve_dataset("synthetic-small", nodes_per_class=10)
    assert ds.name == "synthetic-small"
    assert ds.node_count == 30
    with pytest.raises(DatasetError, match="unknown dataset"):
        resolve_dataset("no-such-dataset")


def test_knn_collinear_points():
    """Test grafu kNN dla punktów na prostej"""
    print("\n🧪 Test knn_graph...")
    adjacency = knn_graph(np.array([[0.0], [1.0], [10.0]]), 1).toarray()
    expected = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    assert np.array_equal(adjacency, expected)
    print("✅ knn_graph OK")


def test_knn_complete_graph_when_k_is_n_minus_one():
    adjacency = knn_graph(np.random.default_rng(0).normal(size=(3, 2)), 2).toarray()
    assert np.array_equal(adjacency, np.ones((3, 3)) - np.eye(3))


def test_knn_matches_brute_force():
    features = np.random.default_rng(1).normal(size=(20, 4))
    k = 3
    distances = cdist(features, features)
    np.fill_diagonal(distances, np.inf)
    expected = np.zeros((20, 20))
    for u in range(20):
        for v in np.argsort(distances[u], kind="stable")[:k]:
            expected[u, v] = expected[v, u] = 1

    assert np.array_equal(knn_graph(features, k).toarray(), expected)


@pytest.mark.parametrize("k", [0, 3])
def test_knn_rejects_k_out_of_range(k):
    with pytest.raises(DatasetError, match="k out of range"):
        knn_graph(np.zeros((3, 2)), k)
