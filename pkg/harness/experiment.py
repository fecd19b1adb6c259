"""
Orkiestracja eksperymentów: cele -> ataki -> kohorty -> C_sim -> scenariusze unikania -> werdykty

Każdy etap zapisuje wynik w manifeście; tabela metryk składana jest wyłącznie
z wpisów manifestu, więc przerwany przebieg można wznowić tym samym poleceniem.
"""
import json
import logging
import os
import time
from collections import defaultdict
from dataclasses import dataclass, field, asdict
from typing import Dict, Any, Callable, List, Optional, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from attacks.distribution_shift import distribution_shift_attack
from attacks.extraction import AttackConfig, AttackType, run_extraction
from attacks.oracle import InProcessOracle
from config.settings import Config
from core.exceptions import ExperimentError
from data.graph_dataset import GraphDataset
from data.splits import DataSplit, split_dataset
from data.synthetic import resolve_dataset
from fingerprint.csim import SimilarityClassifier, train_csim
from fingerprint.training_set import FingerprintTrainingSet, build_robust_training_set, build_training_set
from fingerprint.verify import verify
from gnn.config import Architecture, GnnConfig
from gnn.model import GnnModel, forward, predict_labels
from gnn.pruning import prune
from gnn.serialization import load_model, save_model
from gnn.training import fine_tune, train
from utils.reporting import output_layout, write_table
from utils.seeding import derive_seed
from utils.visualization import GraphVisualizer
from .manifest import RunManifest
from .metrics import MetricsTable, accuracy, fidelity, fpr_fnr

logger = logging.getLogger(__name__)

INDEPENDENT = "independent"
SURROGATE = "surrogate"
CSIM_KINDS = ("basic", "robust")


@dataclass
class ExperimentConfig:
    """Konfiguracja przebiegu eksperymentu (plik JSON + nadpisania z linii poleceń)"""
    dataset: str = "synthetic"
    synthetic: Dict[str, Any] = field(default_factory=dict)
    target_architectures: List[str] = field(default_factory=lambda: ["GraphSAGE"])
    surrogate_architectures: List[str] = field(default_factory=lambda: ["GraphSAGE", "GAT", "GIN"])
    independent_architectures: List[str] = field(default_factory=lambda: ["GraphSAGE", "GAT", "GIN"])
    attack_types: List[str] = field(default_factory=lambda: ["TypeI", "TypeII"])
    fine_tune: bool = True
    fine_tune_epochs: int = 20
    double_extract: bool = True
    prune_sweep: List[float] = field(default_factory=lambda: list(Config.PRUNE_SWEEP))
    robust: bool = True
    robust_prune_ratios: List[float] = field(default_factory=lambda: list(Config.ROBUST_PRUNE_RATIOS))
    distribution_shift: bool = False
    repeats: int = Config.REPEATS
    seed: int = Config.SEED
    out_dir: str = Config.OUT_DIR
    cohort: Dict[str, int] = field(default_factory=lambda: dict(Config.COHORT))
    hidden_dim: int = Config.HIDDEN_DIM
    max_epochs: int = Config.MAX_EPOCHS
    attack_epochs: Optional[int] = None
    csim_cv_folds: int = Config.CSIM_CV_FOLDS
    parallel: bool = False
    workers: int = 1
    plots: bool = True

    def __post_init__(self):
        self.cohort = {**Config.COHORT, **self.cohort}
        self.validate()

    def validate(self) -> None:
        if self.repeats < 1:
            raise ExperimentError("repeats must be at least 1")
        if any(not 0.0 <= r <= 1.0 for r in self.prune_sweep):
            raise ExperimentError("prune ratios must lie in [0, 1]")
        if any(not 0.0 < r <= Config.MAX_ROBUST_PRUNE_RATIO for r in self.robust_prune_ratios):
            raise ExperimentError(f"robust prune ratios must lie in (0, {Config.MAX_ROBUST_PRUNE_RATIO}]")
        for key in ("csim_surrogates", "csim_independents"):
            if self.cohort[key] < 1:
                raise ExperimentError(f"cohort.{key} must be at least 1")
        for key in ("test_surrogates", "test_independents"):
            if self.cohort[key] < 0:
                raise ExperimentError(f"cohort.{key} must be nonnegative")
        if not self.target_architectures or not self.surrogate_architectures or not self.independent_architectures:
            raise ExperimentError("architecture lists must not be empty")
        if not self.attack_types:
            raise ExperimentError("at least one attack type is required")
        try:
            for arch in self.target_architectures + self.surrogate_architectures + self.independent_architectures:
                Architecture.parse(arch)
            for attack in self.attack_types:
                AttackType.parse(attack)
        except ValueError as e:
            raise ExperimentError(str(e))
        if self.hidden_dim % 4:
            raise ExperimentError("hidden_dim must be divisible by 4 (GAT attention heads)")
        if self.max_epochs < 1 or self.fine_tune_epochs < 1:
            raise ExperimentError("epoch counts must be positive")
        if self.workers < 1:
            raise ExperimentError("workers must be at least 1")

    @property
    def extraction_epochs(self) -> int:
        return self.attack_epochs or self.max_epochs

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def replace(self, **changes) -> "ExperimentConfig":
        payload = self.to_dict()
        payload.update({k: v for k, v in changes.items() if v is not None})
        return ExperimentConfig(**payload)

    @classmethod
    def from_json(cls, path: str, **overrides) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
        unknown = set(payload) - set(cls.__dataclass_fields__)
        if unknown:
            raise ExperimentError(f"unknown experiment config keys: {sorted(unknown)}")
        payload.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**payload)


def _file_key(stage: str) -> str:
    return stage.replace("/", "__")


def _cycle(items: List[Any], index: int) -> Any:
    return items[index % len(items)]


def held_out_halves(split: DataSplit) -> Tuple[np.ndarray, np.ndarray]:
    """Węzły testowe do dostrajania (pozycje parzyste) i do oceny metryk (nieparzyste)"""
    return split.test[::2], split.test[1::2]


class ExperimentRunner:
    """
    Wykonanie jednego przebiegu eksperymentu nad manifestem w `out_dir`

    Klucze etapów mają postać `r{powtórzenie}/{architektura celu}/...`;
    ziarno każdego etapu to derive_seed(seed, klucz).
    """

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.paths = output_layout(cfg.out_dir)
        self.manifest = RunManifest(self.paths["manifest"])
        self.graph: GraphDataset = resolve_dataset(cfg.dataset, **cfg.synthetic)

    # Etapy z manifestem

    def _seed(self, *stage: object) -> int:
        return derive_seed(self.cfg.seed, *stage)

    def _stage(self, key: str, compute: Callable[[], Tuple[Dict[str, Any], Dict[str, Any]]]) -> Dict[str, Any]:
        done = self.manifest.completed(key)
        if done is not None:
            return done
        metrics, outputs = compute()
        return self.manifest.record(key, metrics, outputs)

    def _model_stage(self, key: str, build: Callable[[], Tuple[GnnModel, Dict[str, Any]]]) -> GnnModel:
        path = os.path.join(self.paths["models"], f"{_file_key(key)}.grvm")
        done = self.manifest.completed(key)
        if done is not None and os.path.exists(path):
            return load_model(path)
        model, metrics = build()
        save_model(model, path)
        self.manifest.record(key, metrics, {"model": os.path.relpath(path, self.cfg.out_dir)})
        return model

    def _gnn_config(self, architecture: str, seed: int) -> GnnConfig:
        return GnnConfig.for_architecture(
            architecture,
            hidden_dim=self.cfg.hidden_dim,
            max_epochs=self.cfg.max_epochs,
            seed=seed,
        )

    def _trained(self, key: str, architecture: str, nodes: np.ndarray) -> GnnModel:
        def build():
            model, report = train(self._gnn_config(architecture, self._seed(key)), self.graph, nodes)
            return model, {"train_seconds": report.wall_time_seconds, "epochs_run": report.epochs_run,
                           "validation_accuracy": report.validation_accuracy}
        return self._model_stage(key, build)

    def _extracted(self, key: str, oracle_model: GnnModel, ds: GraphDataset,
                   attack_type: str, architecture: str) -> GnnModel:
        seed = self._seed(key)
        attack = AttackConfig(attack_type=attack_type, surrogate_architecture=architecture,
                              epochs=self.cfg.extraction_epochs, seed=seed)

        def build():
            surrogate = run_extraction(InProcessOracle(oracle_model, seed=seed), ds, attack)
            return surrogate.model, {"train_seconds": surrogate.wall_time_seconds,
                                     "query_count": surrogate.query_count, "attack": attack.to_dict()}
        return self._model_stage(key, build)

    def _cohort(self, jobs: List[Callable[[], GnnModel]]) -> List[GnnModel]:
        if self.cfg.parallel and self.cfg.workers > 1:
            return Parallel(n_jobs=self.cfg.workers, prefer="threads")(delayed(job)() for job in jobs)
        return [job() for job in jobs]

    # Jedno powtórzenie dla jednej architektury celu

    def run_repeat(self, repeat: int, architecture: str) -> None:
        cfg = self.cfg
        prefix = f"r{repeat}/{Architecture.parse(architecture).value}"
        split = split_dataset(self.graph, seed=self._seed("split", repeat))
        self._stage(f"{prefix}/split", lambda: ({"sizes": list(split.sizes())}, {"digest": split.digest()}))
        d_v = split.verification
        ds = self.graph.subgraph(split.surrogate_train)
        eval_seed = self._seed(prefix, "eval")

        target = self._trained(f"{prefix}/target", architecture, split.target_train)
        _, scored = held_out_halves(split)
        target_test = predict_labels(target, self.graph, scored, eval_seed)
        truth_test = self.graph.labels[scored]

        # Kohorta C_sim: surogaty z D_s i modele niezależne trenowane na D_s
        cohort_surrogates = [
            (f"{prefix}/cohort/surrogate-{i}",
             _cycle(cfg.attack_types, i), _cycle(cfg.surrogate_architectures, i))
            for i in range(cfg.cohort["csim_surrogates"])
        ]
        cohort_independents = [
            (f"{prefix}/cohort/independent-{i}", _cycle(cfg.independent_architectures, i))
            for i in range(cfg.cohort["csim_independents"])
        ]
        surrogate_models = self._cohort([
            (lambda k=k, t=t, a=a: self._extracted(k, target, ds, t, a)) for k, t, a in cohort_surrogates
        ])
        independent_models = self._cohort([
            (lambda k=k, a=a: self._trained(k, a, split.surrogate_train)) for k, a in cohort_independents
        ])
        named_surrogates = [(key, model) for (key, _, _), model in zip(cohort_surrogates, surrogate_models)]
        named_independents = [(key, model) for (key, _), model in zip(cohort_independents, independent_models)]
        cohort_seconds = sum(
            self.manifest.completed(key)["metrics"].get("train_seconds", 0.0)
            for key, _ in named_surrogates + named_independents
        )

        classifiers = self._classifiers(prefix, target, named_surrogates, named_independents,
                                        d_v, eval_seed, cohort_seconds)

        def judge(condition: str, suspect_id: str, suspect: GnnModel, truth: str) -> None:
            for kind, csim in classifiers.items():
                key = f"{prefix}/verdict/{kind}/{condition}/{suspect_id}"
                try:
                    self._stage(key, lambda csim=csim, kind=kind, key=key: self._verdict(
                        key, csim, kind, condition, repeat, architecture, target, suspect, truth,
                        d_v, split, scored, target_test, truth_test, eval_seed))
                except Exception as e:
                    self.manifest.record_failure(key, e)

        # Surogaty testowe (osobne ziarna) i modele niezależne testowe
        test_surrogates: List[Tuple[str, str, GnnModel]] = []
        for attack_type in cfg.attack_types:
            attack_name = AttackType.parse(attack_type).value
            for j in range(cfg.cohort["test_surrogates"]):
                key = f"{prefix}/test/{attack_name}/surrogate-{j}"
                try:
                    model = self._extracted(key, target, ds, attack_name, _cycle(cfg.surrogate_architectures, j))
                except Exception as e:
                    self.manifest.record_failure(key, e)
                    continue
                test_surrogates.append((attack_name, f"surrogate-{j}", model))
                judge(attack_name, f"surrogate-{j}", model, SURROGATE)

        test_independents: List[Tuple[str, GnnModel]] = []
        for j in range(cfg.cohort["test_independents"]):
            key = f"{prefix}/test/independent-{j}"
            # nieparzyste: te same dane co cel (najtrudniejszy przypadek)
            nodes = split.target_train if j % 2 else split.surrogate_train
            try:
                model = self._trained(key, _cycle(cfg.independent_architectures, j), nodes)
            except Exception as e:
                self.manifest.record_failure(key, e)
                continue
            test_independents.append((f"independent-{j}", model))
            judge(INDEPENDENT, f"independent-{j}", model, INDEPENDENT)

        self._evasion_suites(prefix, target, ds, split, test_surrogates, judge)

        if cfg.plots and repeat == 0:
            try:
                self._plots(prefix, target, test_surrogates, test_independents, d_v, eval_seed)
            except Exception as e:
                self.manifest.record_failure(f"{prefix}/plots", e)

    def _classifiers(self, prefix: str, target: GnnModel, surrogates, independents, d_v,
                     eval_seed: int, cohort_seconds: float) -> Dict[str, SimilarityClassifier]:
        cfg = self.cfg
        set_path = os.path.join(self.paths["models"], f"{_file_key(prefix)}__csim-training-set.csv")
        classifiers: Dict[str, SimilarityClassifier] = {}
        base_set: Optional[FingerprintTrainingSet] = None

        def training_set() -> FingerprintTrainingSet:
            nonlocal base_set
            if base_set is None:
                if self.manifest.completed(f"{prefix}/csim/training-set") and os.path.exists(set_path):
                    base_set = FingerprintTrainingSet.from_csv(set_path)
                else:
                    base_set = build_training_set(target, surrogates, independents, self.graph, d_v,
                                                  seed=eval_seed, target_id=f"{prefix}/target",
                                                  workers=cfg.workers if cfg.parallel else 1)
                    base_set.to_csv(set_path)
                    self.manifest.record(f"{prefix}/csim/training-set", base_set.counts(),
                                         {"training_set": os.path.relpath(set_path, cfg.out_dir)})
            return base_set

        kinds = ["basic"] + (["robust"] if cfg.robust and cfg.robust_prune_ratios else [])
        for kind in kinds:
            key = f"{prefix}/csim/{kind}"
            path = os.path.join(self.paths["models"], f"{_file_key(key)}.joblib")
            done = self.manifest.completed(key)
            if done is not None and os.path.exists(path):
                classifiers[kind] = SimilarityClassifier.load(path)
                continue
            started = time.perf_counter()
            rows = training_set()
            if kind == "robust":
                rows = build_robust_training_set(rows, target, surrogates, cfg.robust_prune_ratios, self.graph,
                                                 d_v, seed=eval_seed, target_id=f"{prefix}/target")
            csim = train_csim(rows, seed=self._seed(key), cv_folds=cfg.csim_cv_folds)
            fit_seconds = time.perf_counter() - started
            csim.save(path)
            self.manifest.record(key, {
                "cv_accuracy": csim.cv_accuracy,
                "rows": len(rows),
                "fit_seconds": fit_seconds,
                "csim_pipeline_seconds": cohort_seconds + fit_seconds,
                "parallel": cfg.parallel,
                **csim.describe(),
            }, {"csim": os.path.relpath(path, cfg.out_dir)})
            classifiers[kind] = csim
        return classifiers

    def _verdict(self, key: str, csim: SimilarityClassifier, kind: str, condition: str, repeat: int,
                 architecture: str, target: GnnModel, suspect: GnnModel, truth: str, d_v, split: DataSplit,
                 scored: np.ndarray, target_test: np.ndarray, truth_test: np.ndarray, eval_seed: int):
        report = verify(csim, target, suspect, self.graph, d_v, seed=eval_seed)
        report.verification_digest = split.digest()
        suspect_test = predict_labels(suspect, self.graph, scored, eval_seed)
        path = os.path.join(self.paths["verdicts"], f"{_file_key(key)}.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write(report.to_json())
        metrics = {
            "repeat": repeat,
            "target_architecture": Architecture.parse(architecture).value,
            "csim": kind,
            "condition": condition,
            "truth": truth,
            "verdict": report.verdict.value,
            "similar_fraction": report.similar_fraction,
            "accuracy": accuracy(suspect_test, truth_test),
            "fidelity": fidelity(suspect_test, target_test),
            "scored_nodes": scored.tolist(),
        }
        return metrics, {"verdict": os.path.relpath(path, self.cfg.out_dir)}

    def _evasion_suites(self, prefix: str, target: GnnModel, ds: GraphDataset, split: DataSplit,
                        test_surrogates: List[Tuple[str, str, GnnModel]], judge) -> None:
        cfg = self.cfg
        tuning, _ = held_out_halves(split)
        for attack_name, suspect_id, surrogate in test_surrogates:
            if cfg.fine_tune:
                key = f"{prefix}/evasion/fine-tune/{attack_name}/{suspect_id}"
                try:
                    tuned = self._model_stage(key, lambda s=surrogate, k=key: (
                        fine_tune(s, self.graph, tuning, cfg.fine_tune_epochs,
                                  exclude=split.surrogate_train, seed=self._seed(k)),
                        {"tuned_nodes": tuning.tolist()}))
                    judge(f"fine-tune/{attack_name}", suspect_id, tuned, SURROGATE)
                except Exception as e:
                    self.manifest.record_failure(key, e)

            if cfg.double_extract:
                key = f"{prefix}/evasion/double/{attack_name}/{suspect_id}"
                try:
                    second = self._extracted(key, surrogate, ds, attack_name, surrogate.config.architecture.value)
                    judge(f"double/{attack_name}", suspect_id, second, SURROGATE)
                except Exception as e:
                    self.manifest.record_failure(key, e)

            for ratio in cfg.prune_sweep:
                judge(f"prune-{ratio:g}/{attack_name}", suspect_id, prune(surrogate, ratio), SURROGATE)

        if cfg.distribution_shift:
            attack_name = AttackType.parse(cfg.attack_types[0]).value
            key = f"{prefix}/evasion/distribution-shift"
            seed = self._seed(key)
            attack = AttackConfig(attack_type=attack_name, surrogate_architecture=cfg.surrogate_architectures[0],
                                  epochs=cfg.extraction_epochs, seed=seed)
            try:
                shifted = self._model_stage(key, lambda: (
                    distribution_shift_attack(InProcessOracle(target, seed=seed), ds, attack).model, {}))
                judge("distribution-shift", "surrogate-0", shifted, SURROGATE)
            except Exception as e:
                self.manifest.record_failure(key, e)

    def _plots(self, prefix: str, target: GnnModel, test_surrogates, test_independents, d_v, eval_seed: int) -> None:
        plots_dir = self.paths["plots"]
        H_target, _ = forward(target, self.graph, d_v, eval_seed)
        sets = {"target": H_target}
        if test_surrogates:
            sets["surrogate"] = forward(test_surrogates[0][2], self.graph, d_v, eval_seed)[0]
        if test_independents:
            sets["independent"] = forward(test_independents[0][1], self.graph, d_v, eval_seed)[0]
        base = os.path.join(plots_dir, _file_key(prefix))
        projection, _ = GraphVisualizer.emit_projection_plot(sets, f"{base}__projection", seed=eval_seed)
        others = [(f"{attack}/{sid}", SURROGATE, model) for attack, sid, model in test_surrogates]
        others += [(sid, INDEPENDENT, model) for sid, model in test_independents]
        histogram, _ = GraphVisualizer.emit_distance_histogram(target, others, self.graph, d_v,
                                                               f"{base}__distances", seed=eval_seed)
        self.manifest.record(f"{prefix}/plots", {}, {
            "projection": os.path.relpath(projection, self.cfg.out_dir),
            "distances": os.path.relpath(histogram, self.cfg.out_dir),
        })

    # Cały przebieg

    def run(self) -> MetricsTable:
        cfg = self.cfg
        logger.info(f"Eksperyment: {cfg.dataset}, {cfg.repeats} powtórzeń, wyniki w {cfg.out_dir}")
        self.manifest.record("config", {}, {"config": cfg.to_dict(), "dataset": self.graph.summary()})
        for repeat in range(cfg.repeats):
            for architecture in cfg.target_architectures:
                try:
                    self.run_repeat(repeat, architecture)
                except Exception as e:
                    self.manifest.record_failure(f"r{repeat}/{Architecture.parse(architecture).value}", e)

        table = table_from_manifest(self.manifest)
        write_table(table, self.paths["tables"])
        sweep = pruning_sweep_frame(self.manifest)
        if cfg.plots and not sweep.empty:
            GraphVisualizer.emit_pruning_plot(sweep, os.path.join(self.paths["plots"], "pruning_sweep"))
        failures = self.manifest.failures()
        if failures:
            logger.warning(f"{len(failures)} etapów zakończyło się błędem (szczegóły w manifeście)")
        return table


def run_experiment(cfg: ExperimentConfig) -> MetricsTable:
    """Pełny przebieg eksperymentu; wznawia etapy ukończone w istniejącym manifeście"""
    return ExperimentRunner(cfg).run()


# Składanie tabel z manifestu

def _verdict_entries(manifest: RunManifest) -> List[Dict[str, Any]]:
    return [entry["metrics"] for entry in manifest.latest()
            if "/verdict/" in entry["stage"] and entry["status"] == "completed"]


def _row_name(architecture: str, kind: str, condition: str) -> str:
    name = f"{architecture}/{condition}"
    return name if kind == "basic" else f"{name} [robust]"


def table_from_manifest(manifest: RunManifest) -> MetricsTable:
    """
    Tabela metryk odtworzona z manifestu

    Wiersze ataków (TypeI / TypeII) biorą FPR z modeli niezależnych tego samego
    powtórzenia; wiersze scenariuszy unikania raportują tylko FNR.
    """
    groups: Dict[Tuple[int, str, str, str], List[Dict[str, Any]]] = defaultdict(list)
    for metrics in _verdict_entries(manifest):
        groups[(metrics["repeat"], metrics["target_architecture"], metrics["csim"], metrics["condition"])].append(metrics)

    attack_names = {member.value for member in AttackType}
    table = MetricsTable()
    for (repeat, architecture, kind, condition), rows in sorted(groups.items()):
        name = _row_name(architecture, kind, condition)
        pairs = [(row["truth"], row["verdict"]) for row in rows]
        fpr, fnr = fpr_fnr(pairs)
        if condition in attack_names:
            independents = groups.get((repeat, architecture, kind, INDEPENDENT), [])
            fpr, _ = fpr_fnr([(row["truth"], row["verdict"]) for row in independents])
        table.add(name, "accuracy", float(np.mean([row["accuracy"] for row in rows])))
        table.add(name, "fidelity", float(np.mean([row["fidelity"] for row in rows])))
        table.add(name, "fpr", fpr)
        table.add(name, "fnr", fnr)

        target = manifest.completed(f"r{repeat}/{architecture}/target")
        csim = manifest.completed(f"r{repeat}/{architecture}/csim/{kind}")
        table.add(name, "target_train_seconds", target["metrics"].get("train_seconds") if target else None)
        table.add(name, "csim_pipeline_seconds", csim["metrics"].get("csim_pipeline_seconds") if csim else None)
    return table


def pruning_sweep_frame(manifest: RunManifest) -> pd.DataFrame:
    """Średnia dokładność i FNR przyciętych surogatów per (C_sim, współczynnik)"""
    buckets: Dict[Tuple[str, float], List[Dict[str, Any]]] = defaultdict(list)
    for metrics in _verdict_entries(manifest):
        condition = metrics["condition"]
        if condition.startswith("prune-"):
            ratio = float(condition.split("/")[0][len("prune-"):])
            buckets[(metrics["csim"], ratio)].append(metrics)
    rows = []
    for (kind, ratio), entries in sorted(buckets.items()):
        _, fnr = fpr_fnr([(e["truth"], e["verdict"]) for e in entries])
        rows.append({
            "csim": kind,
            "ratio": ratio,
            "accuracy": float(np.mean([e["accuracy"] for e in entries])),
            "fnr": fnr,
        })
    return pd.DataFrame(rows, columns=["csim", "ratio", "accuracy", "fnr"])
