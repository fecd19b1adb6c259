"""
Długie przebiegi end-to-end na domyślnym grafie syntetycznym (pomiń: pytest -m "not slow")
"""
from itertools import product

import numpy as np
import pytest

from attacks import AttackConfig, InProcessOracle, run_extraction
from conftest import small_config
from data import resolve_dataset, split_dataset
from fingerprint import Verdict, build_training_set, train_csim, verify
from gnn import predict_labels, train
from harness.metrics import accuracy, fidelity, fpr_fnr

pytestmark = pytest.mark.slow

ARCHITECTURES = ("GraphSAGE", "GAT", "GIN")
ATTACKS = ("TypeI", "TypeII")
REPLICAS = (0, 1)


@pytest.fixture(scope="module")
def cohort():
    """Cel, kohorta C_sim oraz 12 surogatów i 12 modeli niezależnych spoza kohorty"""
    graph = resolve_dataset("synthetic")
    split = split_dataset(graph, seed=0)
    ds = graph.subgraph(split.surrogate_train)

    def independent(arch, seed, nodes):
        return train(small_config(arch, hidden_dim=32, max_epochs=60, seed=seed), graph, nodes)[0]

    def extract(target, attack, arch, seed):
        cfg = AttackConfig(attack_type=attack, surrogate_architecture=arch, epochs=60, seed=seed,
                           head_hidden=32, learning_rate=0.01)
        return run_extraction(InProcessOracle(target, seed=seed), ds, cfg).model

    target = independent("GraphSAGE", 1, split.target_train)
    csim_surrogates = [extract(target, attack, arch, 100 + i)
                       for i, (attack, arch) in enumerate(product(ATTACKS, ARCHITECTURES))]
    csim_independents = [independent(arch, 200 + i, nodes)
                         for i, (arch, nodes) in enumerate(product(ARCHITECTURES,
                                                                   (split.target_train, split.surrogate_train)))]

    surrogates = {
        (attack, arch, replica): extract(target, attack, arch, 300 + i)
        for i, (attack, arch, replica) in enumerate(product(ATTACKS, ARCHITECTURES, REPLICAS))
    }
    # modele niezależne na danych atakującego (pary do porównania wierności) i na danych celu
    independents = {
        (source, arch, replica): independent(arch, 400 + i, nodes)
        for i, ((source, nodes), arch, replica) in enumerate(product(
            (("attacker", split.surrogate_train), ("owner", split.target_train)), ARCHITECTURES, REPLICAS))
    }

    training_set = build_training_set(target, csim_surrogates, csim_independents, graph, split.verification, seed=0)
    csim = train_csim(training_set, seed=0, hidden_grid=(32,), cv_folds=3)
    return {
        "graph": graph,
        "split": split,
        "target": target,
        "csim": csim,
        "surrogates": surrogates,
        "independents": independents,
    }


def _reports(cohort, models):
    return [
        verify(cohort["csim"], cohort["target"], model, cohort["graph"], cohort["split"].verification, seed=0)
        for model in models
    ]


def _fractions(cohort, models):
    return [report.similar_fraction for report in _reports(cohort, models)]


def test_cohort_covers_all_architectures_and_attacks(cohort):
    assert len(cohort["surrogates"]) >= 10 and len(cohort["independents"]) >= 10
    assert {arch for _, arch, _ in cohort["surrogates"]} == set(ARCHITECTURES)
    assert {attack for attack, _, _ in cohort["surrogates"]} == set(ATTACKS)
    assert {arch for _, arch, _ in cohort["independents"]} == set(ARCHITECTURES)


def test_verdict_error_rates(cohort):
    """Test skuteczności: FNR = 0 i FPR <= 0.05 na modelach spoza kohorty C_sim"""
    print("🧪 Test FPR/FNR...")
    pairs = [(Verdict.SURROGATE, r.verdict) for r in _reports(cohort, cohort["surrogates"].values())]
    pairs += [(Verdict.INDEPENDENT, r.verdict) for r in _reports(cohort, cohort["independents"].values())]

    fpr, fnr = fpr_fnr(pairs)

    assert fnr == 0.0
    assert fpr <= 0.05
    print(f"✅ FPR {fpr:.3f}, FNR {fnr:.3f}")


def test_surrogates_score_above_independents(cohort):
    """Test separacji: każdy surogat bardziej podobny niż każdy model niezależny"""
    print("🧪 Test separacji...")
    surrogate = _fractions(cohort, cohort["surrogates"].values())
    independent = _fractions(cohort, cohort["independents"].values())

    assert np.mean(surrogate) >= 0.7
    assert np.mean(independent) <= 0.3
    assert min(surrogate) > max(independent)
    print(f"✅ Surogaty {np.mean(surrogate):.2f} (min {min(surrogate):.2f}) "
          f"vs niezależne {np.mean(independent):.2f} (max {max(independent):.2f})")


def test_type_i_extraction_quality(cohort):
    """Test jakości ekstrakcji: wierność surogatu Type I >= 0.85 i wyższa niż modelu niezależnego"""
    print("🧪 Test wierności Type I...")
    graph, nodes = cohort["graph"], cohort["split"].test
    truth = graph.labels[nodes]
    target_pred = predict_labels(cohort["target"], graph, nodes, seed=0)
    target_accuracy = accuracy(target_pred, truth)

    for arch, replica in product(ARCHITECTURES, REPLICAS):
        surrogate_pred = predict_labels(cohort["surrogates"][("TypeI", arch, replica)], graph, nodes, seed=0)
        independent_pred = predict_labels(cohort["independents"][("attacker", arch, replica)], graph, nodes, seed=0)

        surrogate_fidelity = fidelity(surrogate_pred, target_pred)
        assert surrogate_fidelity >= 0.85
        assert abs(accuracy(surrogate_pred, truth) - target_accuracy) <= 0.05
        assert fidelity(independent_pred, target_pred) < surrogate_fidelity
    print("✅ Wierność Type I OK")


def test_verification_is_deterministic(cohort):
    model = cohort["surrogates"][("TypeI", "GraphSAGE", 0)]
    assert _fractions(cohort, [model]) == _fractions(cohort, [model])
