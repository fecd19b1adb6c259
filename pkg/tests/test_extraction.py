"""
Testy ataku ekstrakcji: strata L_R, harmonogram naprzemienny, Type II, wyrocznie, dyskryminator
"""
import numpy as np
import pytest
import torch

from attacks import (
    AttackConfig,
    AttackType,
    HttpOracle,
    InProcessOracle,
    answer_query,
    attack_structure,
    chain_extraction,
    decode_query,
    distribution_shift_attack,
    encode_query,
    gaussian_screen,
    row_21_loss,
    run_extraction,
    train_discriminator
)
from conftest import path_graph
from core.exceptions import DatasetError, OracleError
from gnn import forward, model_to_bytes


def _quick_config(**overrides) -> AttackConfig:
    params = {"epochs": 2, "seed": 3, "head_hidden": 8, "learning_rate": 0.01}
    params.update(overrides)
    return AttackConfig(**params)


def test_row_21_loss_examples():
    """Test straty L_R"""
    print("🧪 Test row_21_loss...")
    assert row_21_loss(np.array([[3.0, 4.0]]), np.array([[0.0, 0.0]])) == pytest.approx(5.0)
    identity = np.random.default_rng(0).normal(size=(6, 3))
    assert row_21_loss(identity, identity) == 0.0
    print("✅ row_21_loss OK")


def test_row_21_loss_matches_brute_force():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n, d = rng.integers(1, 10), rng.integers(1, 6)
        a, b = rng.normal(size=(n, d)), rng.normal(size=(n, d))
        expected = sum(np.sqrt(sum((a[i, j] - b[i, j]) ** 2 for j in range(d))) for i in range(n)) / n
        assert row_21_loss(a, b) == pytest.approx(expected, rel=1e-9, abs=1e-9)


def test_row_21_loss_is_differentiable_and_checks_shapes():
    a = torch.tensor([[3.0, 4.0]], requires_grad=True)
    loss = row_21_loss(a, torch.zeros(1, 2))
    loss.backward()
    assert torch.allclose(a.grad, torch.tensor([[0.6, 0.8]]))
    with pytest.raises(ValueError, match="shape mismatch"):
        row_21_loss(np.zeros((2, 3)), np.zeros((3, 3)))


def test_attack_type_parsing():
    assert AttackType.parse("type-ii") is AttackType.TYPE_II
    assert AttackType.parse("TYPE_I") is AttackType.TYPE_I
    with pytest.raises(ValueError):
        AttackType.parse("TypeIII")


def _snapshot(module):
    return {name: t.detach().clone() for name, t in module.state_dict().items()}


def _same(a, b):
    return all(torch.equal(a[name], b[name]) for name in a)


def test_extraction_alternates_embedding_and_classifier_phases(model_zoo, tiny_graph, tiny_split):
    """Test naprzemiennego harmonogramu: faza embeddingu nie rusza głowicy i odwrotnie"""
    print("\n🧪 Test harmonogramu ekstrakcji...")
    ds = tiny_graph.subgraph(tiny_split.surrogate_train)
    snapshots = []

    def hook(epoch, phase, model):
        snapshots.append((phase, _snapshot(model.layers), _snapshot(model.head)))

    run_extraction(InProcessOracle(model_zoo["target"]), ds, _quick_config(epochs=3), on_phase=hook)

    assert [phase for phase, _, _ in snapshots] == ["init"] + ["embedding", "classifier"] * 3
    for (_, layers_before, head_before), (phase, layers_after, head_after) in zip(snapshots, snapshots[1:]):
        if phase == "embedding":
            assert _same(head_before, head_after)
            assert not _same(layers_before, layers_after)
        else:
            assert _same(layers_before, layers_after)
            assert not _same(head_before, head_after)
    print("✅ Harmonogram OK")


def test_extraction_reduces_embedding_loss(model_zoo, tiny_graph, tiny_split):
    ds = tiny_graph.subgraph(tiny_split.surrogate_train)
    surrogate = run_extraction(InProcessOracle(model_zoo["target"]), ds, _quick_config(epochs=30))

    assert surrogate.embedding_dim == model_zoo["target"].embedding_dim
    assert surrogate.query_count == ds.node_count
    assert surrogate.embedding_losses[-1] < surrogate.embedding_losses[0]
    assert len(surrogate.classifier_losses) == 30


def test_type_ii_with_complete_knn_graph(model_zoo, tiny_graph):
    ds = tiny_graph.subgraph(np.arange(5))
    cfg = _quick_config(attack_type="TypeII", knn_k=4)

    structure = attack_structure(ds, cfg).toarray()
    assert np.array_equal(structure, np.ones((5, 5)) - np.eye(5))

    surrogate = run_extraction(InProcessOracle(model_zoo["target"]), ds, cfg)
    assert all(np.isfinite(surrogate.embedding_losses))

    with pytest.raises(DatasetError, match="k out of range"):
        run_extraction(InProcessOracle(model_zoo["target"]), ds, cfg.replace(knn_k=5))


def test_chain_extraction_is_deterministic(model_zoo, tiny_graph, tiny_split):
    ds = tiny_graph.subgraph(tiny_split.surrogate_train)
    first_a, second_a = chain_extraction(InProcessOracle(model_zoo["target"]), ds, _quick_config())
    first_b, second_b = chain_extraction(InProcessOracle(model_zoo["target"]), ds, _quick_config())

    assert model_to_bytes(first_a.model) == model_to_bytes(first_b.model)
    assert model_to_bytes(second_a.model) == model_to_bytes(second_b.model)
    assert model_to_bytes(first_a.model) != model_to_bytes(second_a.model)


def test_query_wire_format_preserves_graph():
    graph = path_graph(4)
    features, adjacency, seed = decode_query(encode_query(graph.features, graph.adjacency, seed=9))

    assert np.array_equal(features, graph.features)
    assert (adjacency != graph.adjacency).nnz == 0
    assert seed == 9


@pytest.mark.parametrize("payload", [
    {"edges": []},
    {"features": [1.0, 2.0]},
    {"features": [[1.0], [2.0]], "edges": [[0, 5]]},
])
def test_malformed_query_rejected(payload):
    with pytest.raises(OracleError):
        decode_query(payload)


def test_in_process_oracle_counts_queries(model_zoo, tiny_graph):
    oracle = InProcessOracle(model_zoo["target"], seed=0)
    first = oracle.query(tiny_graph.features, tiny_graph.adjacency)
    oracle.query(tiny_graph.features[:10], tiny_graph.adjacency[:10, :10])

    assert oracle.query_count == tiny_graph.node_count + 10
    expected, _ = forward(model_zoo["target"], tiny_graph, np.arange(tiny_graph.node_count), seed=0)
    assert np.array_equal(first, expected)


def test_answer_query_serves_embeddings(model_zoo):
    graph = path_graph(3, feature_dim=8)
    response = answer_query(model_zoo["target"], encode_query(graph.features, graph.adjacency, seed=0))

    assert response["embedding_dim"] == model_zoo["target"].embedding_dim
    assert len(response["embeddings"]) == 3


def test_http_oracle_unreachable():
    oracle = HttpOracle("http://127.0.0.1:9/models/x/query", timeout=2.0)
    graph = path_graph(3)
    with pytest.raises(OracleError):
        oracle.query(graph.features, graph.adjacency)


def test_discriminator_separates_relu_embeddings_from_gaussian(model_zoo, tiny_graph):
    """Test dyskryminatora: embeddingi ReLU vs N(0, I)"""
    print("\n🧪 Test dyskryminatora...")
    embeddings, _ = forward(model_zoo["target"], tiny_graph, np.arange(tiny_graph.node_count))
    _, accuracy = train_discriminator(embeddings, seed=0, epochs=300)
    assert accuracy > 0.9
    print(f"✅ Dokładność dyskryminatora: {accuracy:.3f}")


def test_gaussian_screen():
    samples = np.random.default_rng(0).normal(size=(2000, 4))
    assert gaussian_screen(samples).passed
    assert not gaussian_screen(np.abs(samples)).passed


def test_distribution_shift_attack_runs(model_zoo, tiny_graph, tiny_split):
    ds = tiny_graph.subgraph(tiny_split.surrogate_train)
    surrogate = distribution_shift_attack(InProcessOracle(model_zoo["target"]), ds, _quick_config())
    ablation = distribution_shift_attack(InProcessOracle(model_zoo["target"]), ds, _quick_config(),
                                         fidelity_weight=0.0)

    assert len(surrogate.embedding_losses) == 2
    assert all(np.isfinite(surrogate.embedding_losses + ablation.embedding_losses))
