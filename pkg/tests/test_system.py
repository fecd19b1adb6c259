"""
Testy dla systemu weryfikacji własności modeli GNN
"""
import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import Config
from registry import DisputeState, DisputeStatus
from utils import GraphVisualizer


def test_config():
    """Test konfiguracji"""
    print("🧪 Test konfiguracji...")

    assert abs(sum(Config.SPLIT_FRACTIONS) - 1.0) < 1e-9
    assert Config.HIDDEN_DIM % 4 == 0
    assert set(Config.ARCHITECTURE_DEFAULTS) == {"GraphSAGE", "GAT", "GIN"}
    assert max(Config.ROBUST_PRUNE_RATIOS) <= Config.MAX_ROBUST_PRUNE_RATIO
    assert Config.VERDICT_THRESHOLD == 0.5
    assert len(Config.STATUS_EMOJIS) >= 4

    print("✅ Konfiguracja OK")


def test_dispute_state():
    """Test stanu sporu"""
    print("\n🧪 Test DisputeState...")

    state: DisputeState = {"stage": "open", "trace": [], "seed": 0}

    assert isinstance(state["trace"], list)
    assert DisputeStatus.OPENED.terminal is False
    assert DisputeStatus.REJECTED_TIMESTAMP.terminal
    assert DisputeStatus.VERIFIED_SURROGATE.verified

    print("✅ DisputeState OK")


def test_dispute_diagram():
    """Test diagramu przepływu sporu"""
    print("\n🧪 Test diagramu...")

    code = GraphVisualizer.get_static_mermaid_code()
    assert code.strip().startswith("graph")
    assert "Fidelity" in code and "end_node" in code

    print("✅ Diagram OK")


def test_imports():
    """Test importów modułów"""
    print("\n🧪 Test importów...")

    from attacks import run_extraction, InProcessOracle
    from core.graph_builder import DisputeGraphBuilder
    from fingerprint import train_csim, verify
    from gnn import train, prune
    from harness import run_experiment
    from registry import ModelRegistry, RegistryServer
    assert all([run_extraction, InProcessOracle, DisputeGraphBuilder, train_csim, verify, train, prune,
                run_experiment, ModelRegistry, RegistryServer])

    print("✅ Wszystkie importy działają")


def test_grove_system(tmp_path):
    """Test głównego systemu: cel -> surogat -> C_sim -> werdykt -> spór"""
    print("\n🧪 Test GroveSystem...")

    from grove_system import GroveSystem

    system = GroveSystem(out_dir=str(tmp_path / "runs"), registry_dir=str(tmp_path / "registry"), seed=0)
    graph = system.dataset("synthetic-small", nodes_per_class=40, feature_dim=8)
    split = system.split(graph)

    target, _, test_accuracy = system.train_target(graph, "GraphSAGE", hidden_dim=16, max_epochs=20,
                                                   learning_rate=0.01)
    surrogate = system.attack(target, graph, "TypeI", "GraphSAGE", epochs=10)
    independent, _, _ = system.train_target(graph, "GIN", name="independent", nodes=split.surrogate_train,
                                            hidden_dim=16, max_epochs=10)
    assert 0.0 <= test_accuracy <= 1.0
    assert os.path.exists(system.model_path("surrogate"))

    training_set, csv_path = system.cohort(target, graph, [("surrogate", surrogate.model)],
                                           [("independent", independent)])
    assert training_set.counts() == {"positive": split.verification.size, "negative": split.verification.size}
    csim, _ = system.fingerprint_train(training_set)
    report, verdict_path = system.fingerprint_verify(csim, target, surrogate.model, graph)
    assert report.verification_digest == split.digest()
    assert os.path.exists(verdict_path)

    owner = system.register(target, "owner", csim=csim)
    suspect = system.register(surrogate.model, "suspect")
    dispute = system.dispute(owner.model_id, suspect.model_id, target, surrogate.model, graph=graph)
    assert dispute.status.verified
    assert dispute.verdict.verdict.value == report.verdict.value

    print(f"✅ GroveSystem OK ({dispute.status.value})")


def run_all_tests():
    """Uruchom wszystkie testy"""
    print("🚀 Uruchamiam testy systemu weryfikacji własności\n")

    tests = [
        test_config,
        test_dispute_state,
        test_dispute_diagram,
        test_imports
    ]

    failed = 0
    for test in tests:
        try:
            test()
        except Exception as e:
            print(f"❌ Test {test.__name__} nie powiódł się: {e}")
            failed += 1

    print(f"\n📊 Podsumowanie: {len(tests) - failed}/{len(tests)} testów przeszło")

    if failed == 0:
        print("✅ Wszystkie testy przeszły pomyślnie!")
    else:
        print(f"❌ {failed} testów nie powiodło się")


if __name__ == "__main__":
    run_all_tests()
