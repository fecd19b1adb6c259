"""
Testy odcisku: wektory odległości, zbiór treningowy C_sim, klasyfikator i werdykty
"""
import joblib
import numpy as np
import pandas as pd
import pytest

from core.exceptions import FingerprintError
from fingerprint import (
    DistanceVector,
    FingerprintTrainingSet,
    PairLabel,
    SimilarityClassifier,
    Verdict,
    VerdictReport,
    build_robust_training_set,
    build_training_set,
    distance_vector,
    euclidean_distances,
    train_csim,
    verdict_from_decisions,
    verify,
    verify_embeddings
)


def _separable_set(n: int = 60, dim: int = 4, seed: int = 0) -> FingerprintTrainingSet:
    """Pozytywne wiersze blisko zera, negatywne wyraźnie dalej"""
    rng = np.random.default_rng(seed)
    positives = np.abs(rng.normal(0.0, 0.05, size=(n, dim)))
    negatives = 1.0 + np.abs(rng.normal(0.0, 0.5, size=(n, dim)))
    provenance = pd.DataFrame({
        "target_id": "t",
        "other_id": ["s"] * n + ["i"] * n,
        "node_id": np.concatenate([np.arange(n), np.arange(n)]),
        "kind": ["surrogate"] * n + ["independent"] * n,
    })
    return FingerprintTrainingSet(np.vstack([positives, negatives]), np.repeat([1, 0], n), provenance)


def _quick_csim(training_set, **overrides):
    params = {"seed": 0, "hidden_grid": (16,), "activations": ("relu",), "cv_folds": 3}
    params.update(overrides)
    return train_csim(training_set, **params)


@pytest.mark.parametrize("h_a, h_b, expected", [
    ([1.0, 2.0], [1.0, 2.0], [0.0, 0.0]),
    ([1.0, 0.0], [0.0, 1.0], [1.0, 1.0]),
    ([3.0, -1.0, 2.0], [1.0, 1.0, 2.0], [4.0, 4.0, 0.0]),
])
def test_distance_vector_examples(h_a, h_b, expected):
    """Test wektorów odległości"""
    print("🧪 Test distance_vector...")
    assert np.array_equal(distance_vector(h_a, h_b).values, expected)
    assert np.array_equal(distance_vector(h_b, h_a).values, expected)
    print("✅ distance_vector OK")


def test_distance_vector_rejects_bad_input():
    with pytest.raises(FingerprintError, match="dimension mismatch"):
        distance_vector([1.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(FingerprintError):
        DistanceVector(np.array([0.5, -0.1]))


def test_euclidean_distances_per_node():
    a = np.array([[3.0, 4.0], [1.0, 1.0]])
    assert np.allclose(euclidean_distances(a, np.zeros((2, 2))), [5.0, np.sqrt(2.0)])


def test_training_set_counts_and_provenance(model_zoo, tiny_graph, tiny_split):
    """Test liczności zbioru treningowego C_sim"""
    print("\n🧪 Test build_training_set...")
    d_v = tiny_split.verification
    independents = [("ind-0", model_zoo["independents"][0]), ("ind-1", model_zoo["independents"][1]),
                    ("ind-2", model_zoo["independents"][0])]
    training_set = build_training_set(model_zoo["target"], model_zoo["surrogates"], independents,
                                      tiny_graph, d_v, seed=0)

    assert training_set.counts() == {"positive": 2 * d_v.size, "negative": 3 * d_v.size}
    assert training_set.embedding_dim == model_zoo["target"].embedding_dim
    assert set(training_set.provenance["other_id"]) == {"surrogate-0", "surrogate-1", "ind-0", "ind-1", "ind-2"}
    assert set(training_set.provenance["node_id"]) == set(d_v.tolist())
    assert all(row.label in (PairLabel.POSITIVE, PairLabel.NEGATIVE) for row in training_set.rows())
    print("✅ build_training_set OK")


def test_target_as_its_own_surrogate_gives_zero_rows(model_zoo, tiny_graph, tiny_split):
    target = model_zoo["target"]
    training_set = build_training_set(target, [target], model_zoo["independents"], tiny_graph,
                                      tiny_split.verification, seed=0)
    positives = training_set.features[training_set.labels == 1]
    assert np.all(positives == 0.0)


def test_training_set_needs_both_kinds(model_zoo, tiny_graph, tiny_split):
    with pytest.raises(FingerprintError):
        build_training_set(model_zoo["target"], [], model_zoo["independents"], tiny_graph, tiny_split.verification)


def test_robust_training_set_adds_pruned_positives(zoo_training_set, model_zoo, tiny_graph, tiny_split):
    ratios = (0.1, 0.2, 0.3, 0.4)
    robust = build_robust_training_set(zoo_training_set, model_zoo["target"], model_zoo["surrogates"], ratios,
                                       tiny_graph, tiny_split.verification, seed=0)

    n = tiny_split.verification.size
    assert len(robust) == len(zoo_training_set) + len(model_zoo["surrogates"]) * len(ratios) * n
    assert robust.counts()["negative"] == zoo_training_set.counts()["negative"]
    assert (robust.provenance["kind"] == "pruned-surrogate").sum() == 8 * n


def test_robust_training_set_edge_cases(zoo_training_set, model_zoo, tiny_graph, tiny_split):
    same = build_robust_training_set(zoo_training_set, model_zoo["target"], model_zoo["surrogates"], [],
                                     tiny_graph, tiny_split.verification)
    assert same is zoo_training_set
    with pytest.raises(FingerprintError, match="outside"):
        build_robust_training_set(zoo_training_set, model_zoo["target"], model_zoo["surrogates"], [0.5],
                                  tiny_graph, tiny_split.verification)


def test_training_set_csv_round_trip(tmp_path, zoo_training_set):
    path = zoo_training_set.to_csv(str(tmp_path / "training.csv"))
    restored = FingerprintTrainingSet.from_csv(path)

    assert np.allclose(restored.features, zoo_training_set.features)
    assert np.array_equal(restored.labels, zoo_training_set.labels)
    assert restored.provenance["other_id"].tolist() == zoo_training_set.provenance["other_id"].tolist()


def test_csim_learns_separable_rows():
    """Test C_sim na rozdzielnych danych"""
    print("\n🧪 Test train_csim...")
    csim = _quick_csim(_separable_set())
    assert csim.cv_accuracy >= 0.99
    assert csim.embedding_dim == 4
    assert len(csim.grid) == 1
    print(f"✅ C_sim CV: {csim.cv_accuracy:.3f}")


def test_csim_grid_search_covers_every_cell():
    csim = train_csim(_separable_set(n=30), seed=0, hidden_grid=(8, 16), activations=("tanh", "relu"), cv_folds=3)
    assert {(cell["hidden_dim"], cell["activation"]) for cell in csim.grid} == {
        (8, "tanh"), (8, "relu"), (16, "tanh"), (16, "relu")
    }
    assert csim.cv_accuracy == max(cell["mean_cv_accuracy"] for cell in csim.grid)


def test_csim_rejects_single_label():
    training_set = _separable_set(n=10)
    positives = training_set.labels == 1
    single = FingerprintTrainingSet(training_set.features[positives], training_set.labels[positives],
                                    training_set.provenance[positives])
    with pytest.raises(FingerprintError, match="single-label"):
        _quick_csim(single)


def test_csim_checks_embedding_dimension():
    csim = _quick_csim(_separable_set())
    with pytest.raises(FingerprintError, match="dimension mismatch"):
        csim.predict_proba(np.zeros((2, 5)))


def test_csim_save_and_load(tmp_path):
    csim = _quick_csim(_separable_set())
    path = csim.save(str(tmp_path / "csim.joblib"))
    restored = SimilarityClassifier.load(path)

    rows = np.random.default_rng(3).random((5, 4))
    assert np.array_equal(restored.predict_proba(rows), csim.predict_proba(rows))

    joblib.dump({"not": "a classifier"}, str(tmp_path / "other.joblib"))
    with pytest.raises(FingerprintError):
        SimilarityClassifier.load(str(tmp_path / "other.joblib"))


@pytest.mark.parametrize("decisions, verdict", [
    ([True, True, False, False], Verdict.INDEPENDENT),
    ([True, True, True, False], Verdict.SURROGATE),
    ([False], Verdict.INDEPENDENT),
])
def test_verdict_threshold(decisions, verdict):
    assert verdict_from_decisions(np.array(decisions)).verdict is verdict


def test_verdict_needs_pairs():
    with pytest.raises(FingerprintError):
        verdict_from_decisions(np.array([], dtype=bool))


def test_identical_embeddings_are_similar():
    csim = _quick_csim(_separable_set())
    H = np.random.default_rng(5).normal(size=(10, 4))
    report = verify_embeddings(csim, H, H)
    assert report.verdict is Verdict.SURROGATE
    assert report.similar_fraction == 1.0


def test_verdicts_on_cohort_models(zoo_csim, model_zoo, tiny_graph, tiny_split):
    """Test werdyktów dla surogatu i modelu niezależnego"""
    print("\n🧪 Test verify...")
    d_v = tiny_split.verification
    surrogate = verify(zoo_csim, model_zoo["target"], model_zoo["surrogates"][0], tiny_graph, d_v, seed=0)
    independent = verify(zoo_csim, model_zoo["target"], model_zoo["independents"][0], tiny_graph, d_v, seed=0)

    assert surrogate.is_surrogate
    assert independent.verdict is Verdict.INDEPENDENT
    assert surrogate.pair_count == d_v.size
    print("✅ verify OK")


def test_verdict_report_round_trip():
    report = verdict_from_decisions(np.array([True, False, True]))
    report.verification_digest = "abc"
    restored = VerdictReport.from_dict(report.to_dict())
    assert restored.verdict is report.verdict
    assert restored.verification_digest == "abc"
    assert np.array_equal(restored.per_node_decisions, report.per_node_decisions)
