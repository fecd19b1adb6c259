"""
Testy warstwy eksperymentów: metryki, manifest, wykresy, przebieg end-to-end i CLI
"""
import json
import math
import os

import numpy as np
import pandas as pd
import pytest

from core.exceptions import ExperimentError
from data import resolve_dataset, split_dataset
from grove_cli import build_parser, main
from harness import ExperimentConfig, MetricsTable, RunManifest, accuracy, fidelity, fpr_fnr, mean_ci, run_experiment
from harness.experiment import held_out_halves, pruning_sweep_frame
from utils import GraphVisualizer, centroid_distances, derive_seed, overlap_coefficient, write_table


def test_accuracy_and_fidelity():
    """Test dokładności i wierności"""
    print("🧪 Test metryk...")
    assert accuracy([0, 1, 1, 2], [0, 1, 2, 2]) == 0.75
    assert fidelity([1, 1, 0], [1, 1, 0]) == 1.0
    with pytest.raises(ValueError, match="empty"):
        accuracy([], [])
    with pytest.raises(ValueError, match="differ in length"):
        fidelity([0, 1], [0])
    print("✅ Metryki OK")


def test_fpr_fnr_counts():
    pairs = [("independent", "surrogate")] + [("independent", "independent")] * 9 + [("surrogate", "surrogate")] * 5
    assert fpr_fnr(pairs) == (pytest.approx(0.1), 0.0)


def test_fpr_fnr_undefined_rates_are_none():
    assert fpr_fnr([("surrogate", "independent")]) == (None, 1.0)
    assert fpr_fnr([("independent", "independent")]) == (0.0, None)
    assert fpr_fnr([]) == (None, None)
    with pytest.raises(ValueError, match="unknown ground truth"):
        fpr_fnr([("target", "surrogate")])


def test_mean_ci():
    mean, half = mean_ci([1.0, 2.0, 3.0])
    assert mean == 2.0
    assert half == pytest.approx(1.96 / math.sqrt(3))
    assert mean_ci([0.4]) == (0.4, None)
    assert mean_ci([None, None]) == (None, None)
    assert mean_ci([None, 0.5, 0.7])[0] == pytest.approx(0.6)


def test_metrics_table(tmp_path):
    table = MetricsTable()
    for value in (0.1, 0.3):
        table.add("GraphSAGE/TypeI", "fnr", value)
    table.add("GraphSAGE/TypeI", "fpr", None)
    with pytest.raises(ValueError):
        table.add("GraphSAGE/TypeI", "accuracy", 1.5)

    frame = table.to_frame()
    assert frame.loc[0, "fnr_mean"] == pytest.approx(0.2)
    assert "target_train_seconds_mean" not in table.metrics_frame().columns
    markdown = table.to_markdown()
    assert "0.200 ±" in markdown
    assert "n/a" in markdown
    lines = markdown.strip().splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("| condition") and "fnr" in lines[0]
    assert set(lines[1]) <= set("|-: ")
    assert lines[2].startswith("| GraphSAGE/TypeI")
    assert MetricsTable().to_markdown().strip().splitlines()[0].startswith("| condition")

    paths = write_table(table, str(tmp_path / "tables"))
    assert os.path.exists(paths["csv"]) and os.path.exists(paths["markdown"])


def test_derive_seed():
    assert derive_seed(0, "r0", "target") == derive_seed(0, "r0", "target")
    assert derive_seed(0, "r0", "target") != derive_seed(0, "r1", "target")
    assert derive_seed(0, "split") != derive_seed(1, "split")
    assert all(0 <= derive_seed(s, "x") < 2 ** 31 - 1 for s in range(50))


def test_manifest_record_and_reload(tmp_path):
    """Test manifestu przebiegu"""
    print("\n🧪 Test manifestu...")
    path = str(tmp_path / "manifest.jsonl")
    manifest = RunManifest(path)
    manifest.record("r0/GraphSAGE/target", {"train_seconds": 1.5}, {"model": "models/t.grvm"})
    try:
        raise RuntimeError("boom")
    except RuntimeError as e:
        manifest.record_failure("r0/GraphSAGE/plots", e)
    with open(path, "a", encoding="utf-8") as f:
        f.write('{"stage": "broken"\n')

    reloaded = RunManifest(path)

    assert reloaded.completed("r0/GraphSAGE/target")["metrics"]["train_seconds"] == 1.5
    assert reloaded.completed("r0/GraphSAGE/plots") is None
    failures = reloaded.failures()
    assert len(failures) == 1 and "boom" in failures[0]["error"]
    assert [entry["stage"] for entry in reloaded.with_prefix("r0/")] == ["r0/GraphSAGE/target"]
    print("✅ Manifest OK")


def test_manifest_latest_entry_wins(tmp_path):
    manifest = RunManifest(str(tmp_path / "manifest.jsonl"))
    try:
        raise ValueError("first attempt")
    except ValueError as e:
        manifest.record_failure("stage", e)
    manifest.record("stage", {"value": 1})
    assert manifest.completed("stage")["metrics"] == {"value": 1}
    assert manifest.failures() == []


def test_projection_plot(tmp_path):
    points = np.random.default_rng(0).normal(size=(12, 5))
    png, csv = GraphVisualizer.emit_projection_plot({"a": points, "b": points}, str(tmp_path / "proj"))
    frame = pd.read_csv(csv)

    assert os.path.exists(png)
    assert list(frame.columns) == ["model", "x", "y"]
    a, b = frame[frame["model"] == "a"], frame[frame["model"] == "b"]
    assert np.allclose(a[["x", "y"]].to_numpy(), b[["x", "y"]].to_numpy())
    assert centroid_distances(frame, "a")["b"] == pytest.approx(0.0, abs=1e-9)

    GraphVisualizer.emit_projection_plot({"only": points}, str(tmp_path / "single"))
    with pytest.raises(ValueError, match="at least 2 points"):
        GraphVisualizer.emit_projection_plot({"a": points[:1]}, str(tmp_path / "tiny"))
    with pytest.raises(ValueError, match="dimension"):
        GraphVisualizer.emit_projection_plot({"a": points, "b": points[:, :3]}, str(tmp_path / "bad"))


def test_distance_histogram_of_model_with_itself(tmp_path, model_zoo, tiny_graph, tiny_split):
    target = model_zoo["target"]
    others = [("self", "surrogate", target), ("ind", "independent", model_zoo["independents"][0])]
    png, csv = GraphVisualizer.emit_distance_histogram(target, others, tiny_graph, tiny_split.verification,
                                                       str(tmp_path / "hist"))
    frame = pd.read_csv(csv)

    assert os.path.exists(png)
    assert np.all(frame[frame["other_id"] == "self"]["distance"] == 0.0)
    assert len(frame) == 2 * tiny_split.verification.size


def test_overlap_coefficient():
    values = np.linspace(0.0, 1.0, 50)
    assert overlap_coefficient(values, values) == pytest.approx(1.0)
    assert overlap_coefficient(values, values + 10.0, bins=10) == 0.0
    assert overlap_coefficient([], values) is None


def test_workflow_diagram(tmp_path):
    code = GraphVisualizer.get_static_mermaid_code()
    for gate in ("commitment", "timestamp", "well_formed", "fidelity", "verify"):
        assert gate in code
    path = GraphVisualizer.export_to_html(str(tmp_path / "flow.html"))
    assert "mermaid" in open(path, encoding="utf-8").read()


def test_experiment_config_validation():
    with pytest.raises(ExperimentError):
        ExperimentConfig(repeats=0)
    with pytest.raises(ExperimentError):
        ExperimentConfig(prune_sweep=[1.5])
    with pytest.raises(ExperimentError):
        ExperimentConfig(robust_prune_ratios=[0.5])
    with pytest.raises(ExperimentError):
        ExperimentConfig(target_architectures=["ChebNet"])
    with pytest.raises(ExperimentError):
        ExperimentConfig(attack_types=["TypeIII"])
    with pytest.raises(ExperimentError):
        ExperimentConfig(hidden_dim=6)
    with pytest.raises(ExperimentError):
        ExperimentConfig(cohort={"csim_surrogates": 0})

    cfg = ExperimentConfig(cohort={"test_surrogates": 1})
    assert cfg.cohort["csim_independents"] == 3
    assert cfg.extraction_epochs == cfg.max_epochs
    assert cfg.replace(repeats=None, seed=9).seed == 9


def test_experiment_config_from_json(tmp_path):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps({"dataset": "synthetic-small", "repeats": 2}))
    cfg = ExperimentConfig.from_json(str(path), repeats=3, seed=None)
    assert cfg.dataset == "synthetic-small"
    assert cfg.repeats == 3

    path.write_text(json.dumps({"dataset": "synthetic-small", "learning_rate": 0.1}))
    with pytest.raises(ExperimentError, match="unknown experiment config keys"):
        ExperimentConfig.from_json(str(path))


def _tiny_experiment(out_dir: str) -> ExperimentConfig:
    return ExperimentConfig(
        dataset="synthetic-small",
        synthetic={"nodes_per_class": 30, "feature_dim": 8, "intra_edge_prob": 0.1, "inter_edge_prob": 0.01},
        target_architectures=["GraphSAGE"],
        surrogate_architectures=["GraphSAGE"],
        independent_architectures=["GraphSAGE", "GIN"],
        attack_types=["TypeI"],
        fine_tune_epochs=2,
        prune_sweep=[0.2],
        robust_prune_ratios=[0.2],
        repeats=1,
        seed=0,
        out_dir=out_dir,
        cohort={"csim_surrogates": 1, "csim_independents": 1, "test_surrogates": 1, "test_independents": 2},
        hidden_dim=8,
        max_epochs=3,
        csim_cv_folds=2,
    )


@pytest.fixture(scope="module")
def tiny_run(tmp_path_factory):
    out_dir = str(tmp_path_factory.mktemp("experiment"))
    cfg = _tiny_experiment(out_dir)
    return cfg, run_experiment(cfg)


def test_experiment_produces_table_and_artifacts(tiny_run):
    """Test przebiegu eksperymentu end-to-end"""
    print("\n🧪 Test eksperymentu...")
    cfg, table = tiny_run
    manifest = RunManifest(os.path.join(cfg.out_dir, "manifest.jsonl"))

    assert manifest.failures() == []
    conditions = set(table.conditions())
    for row in ("TypeI", "independent", "fine-tune/TypeI", "double/TypeI", "prune-0.2/TypeI"):
        assert f"GraphSAGE/{row}" in conditions
        assert f"GraphSAGE/{row} [robust]" in conditions

    fpr, _ = table.cell("GraphSAGE/TypeI", "fpr")
    assert fpr is not None
    assert table.cell("GraphSAGE/fine-tune/TypeI", "fpr") == (None, None)
    assert table.cell("GraphSAGE/independent", "fnr") == (None, None)

    for relative in ("tables/metrics.csv", "tables/metrics.md", "plots/pruning_sweep.png",
                     "plots/r0__GraphSAGE__projection.png", "plots/r0__GraphSAGE__distances.csv",
                     "models/r0__GraphSAGE__target.grvm", "models/r0__GraphSAGE__csim-training-set.csv",
                     "models/r0__GraphSAGE__csim__robust.joblib"):
        assert os.path.exists(os.path.join(cfg.out_dir, relative)), relative
    assert os.listdir(os.path.join(cfg.out_dir, "verdicts"))

    sweep = pruning_sweep_frame(manifest)
    assert set(sweep["csim"]) == {"basic", "robust"}
    assert sweep["ratio"].tolist() == [0.2, 0.2]
    print("✅ Eksperyment OK")


def test_robust_csim_has_more_rows(tiny_run):
    cfg, _ = tiny_run
    manifest = RunManifest(os.path.join(cfg.out_dir, "manifest.jsonl"))
    basic = manifest.completed("r0/GraphSAGE/csim/basic")["metrics"]
    robust = manifest.completed("r0/GraphSAGE/csim/robust")["metrics"]
    split = manifest.completed("r0/GraphSAGE/split")["metrics"]

    d_v = split["sizes"][3]
    assert basic["rows"] == 2 * d_v
    assert robust["rows"] == basic["rows"] + d_v


def test_experiment_is_reproducible(tiny_run, tmp_path):
    cfg, table = tiny_run
    again = run_experiment(cfg.replace(out_dir=str(tmp_path / "again")))
    pd.testing.assert_frame_equal(table.metrics_frame(), again.metrics_frame())


def test_fine_tune_rows_scored_on_held_out_test_nodes(tiny_run):
    """Test: metryki dostrojonych surogatów liczone na węzłach spoza dostrajania"""
    cfg, _ = tiny_run
    manifest = RunManifest(os.path.join(cfg.out_dir, "manifest.jsonl"))

    tuned = manifest.completed("r0/GraphSAGE/evasion/fine-tune/TypeI/surrogate-0")["metrics"]["tuned_nodes"]
    verdicts = manifest.with_prefix("r0/GraphSAGE/verdict/")
    scored = [entry["metrics"]["scored_nodes"] for entry in verdicts]

    assert tuned
    assert verdicts and all(nodes == scored[0] for nodes in scored)
    assert set(tuned).isdisjoint(scored[0])

    split = split_dataset(resolve_dataset("synthetic-small", **cfg.synthetic),
                          seed=derive_seed(cfg.seed, "split", 0))
    tuning, held_out = held_out_halves(split)
    assert sorted(tuned + scored[0]) == sorted(split.test.tolist())
    assert held_out.tolist() == scored[0]
    assert np.intersect1d(tuning, held_out).size == 0


def test_experiment_resumes_from_manifest(tiny_run):
    cfg, table = tiny_run
    resumed = run_experiment(cfg)

    with open(os.path.join(cfg.out_dir, "manifest.jsonl"), encoding="utf-8") as f:
        stages = [json.loads(line)["stage"] for line in f if line.strip()]
    assert stages.count("r0/GraphSAGE/target") == 1
    assert stages.count("r0/GraphSAGE/csim/basic") == 1
    pd.testing.assert_frame_equal(table.metrics_frame(), resumed.metrics_frame())


def test_cli_dataset_and_workflow(tmp_path, capsys):
    """Test CLI"""
    print("\n🧪 Test CLI...")
    out_dir = str(tmp_path / "runs")
    dataset_dir = str(tmp_path / "small")

    assert main(["--out-dir", out_dir, "dataset", "synth", "--name", "synthetic-small", "--path", dataset_dir]) == 0
    assert os.path.exists(os.path.join(dataset_dir, "edges.tsv"))
    assert main(["--out-dir", out_dir, "dataset", "load", "--path", dataset_dir]) == 0
    assert main(["--out-dir", out_dir, "dataset", "load", "--path", str(tmp_path / "missing")]) == 1
    assert main(["--out-dir", out_dir, "plot", "workflow", "--path", str(tmp_path / "flow.html")]) == 0
    assert os.path.exists(tmp_path / "flow.html")
    assert "❌" in capsys.readouterr().out
    print("✅ CLI OK")


def test_cli_train_target(tmp_path):
    out_dir = str(tmp_path / "runs")
    code = main(["--out-dir", out_dir, "--seed", "3", "train-target", "--dataset", "synthetic-small",
                 "--architecture", "GIN", "--hidden-dim", "8", "--epochs", "2"])
    assert code == 0
    assert os.path.exists(os.path.join(out_dir, "models", "target.grvm"))


def test_cli_requires_action_arguments():
    parser = build_parser()
    assert parser.parse_args(["experiment", "run", "--repeats", "2"]).repeats == 2
    with pytest.raises(SystemExit):
        main(["fingerprint", "verify", "--csim", "c.joblib"])
    with pytest.raises(SystemExit):
        main(["attack"])
