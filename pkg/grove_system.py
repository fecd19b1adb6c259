"""
System weryfikacji własności modeli GNN - główny moduł
"""
import logging
import os
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from attacks import AttackConfig, HttpOracle, InProcessOracle, SurrogateModel, run_extraction
from config.settings import Config
from data import DataSplit, GraphDataset, resolve_dataset, save_dataset, split_dataset
from fingerprint import (
    FingerprintTrainingSet,
    SimilarityClassifier,
    VerdictReport,
    build_robust_training_set,
    build_training_set,
    train_csim,
    verify
)
from gnn import GnnConfig, GnnModel, TrainReport, evaluate, forward, load_model, model_to_bytes, save_model, train
from registry import Dispute, ModelRegistry, RegistryRecord, RegistryServer, open_dispute, resolve
from utils import GraphVisualizer, derive_seed, output_layout

logger = logging.getLogger(__name__)


class GroveSystem:
    """
    Fasada nad całym przepływem: dane, trening celu, ataki, C_sim, werdykty i rejestr

    Modele i artefakty trafiają do `out_dir` w stałym układzie katalogów;
    podział danych jest wyznaczany deterministycznie z ziarna, więc każde
    polecenie może go odtworzyć bez osobnego pliku.
    """

    def __init__(self, out_dir: str = Config.OUT_DIR, registry_dir: str = Config.REGISTRY_DIR,
                 seed: int = Config.SEED):
        self.out_dir = out_dir
        self.registry_dir = registry_dir
        self.seed = seed
        self.paths = output_layout(out_dir)
        self._registry: Optional[ModelRegistry] = None

    # Dane

    def dataset(self, name: str, **overrides) -> GraphDataset:
        return resolve_dataset(name, **overrides)

    def synthesize(self, name: str, path: str, **overrides) -> GraphDataset:
        dataset = resolve_dataset(name, **overrides)
        save_dataset(dataset, path)
        logger.info(f"Zapisano zbiór {dataset.summary()} do {path}")
        return dataset

    def split(self, graph: GraphDataset) -> DataSplit:
        return split_dataset(graph, seed=derive_seed(self.seed, "split", 0))

    def model_path(self, name: str) -> str:
        return os.path.join(self.paths["models"], name if name.endswith(".grvm") else f"{name}.grvm")

    def load(self, name_or_path: str) -> GnnModel:
        path = name_or_path if os.path.exists(name_or_path) else self.model_path(name_or_path)
        return load_model(path)

    # Modele

    def train_target(self, graph: GraphDataset, architecture: str, name: str = "target",
                     nodes: Optional[np.ndarray] = None, **overrides) -> Tuple[GnnModel, TrainReport, float]:
        """Wytrenuj model na D_t (lub podanych węzłach), zapisz i zwróć dokładność testową"""
        split = self.split(graph)
        config = GnnConfig.for_architecture(architecture, seed=derive_seed(self.seed, "model", name), **overrides)
        model, report = train(config, graph, split.target_train if nodes is None else nodes)
        save_model(model, self.model_path(name))
        test_accuracy = evaluate(model, graph, split.test, seed=self.seed)
        logger.info(f"Model {name}: dokładność testowa {test_accuracy:.3f}")
        return model, report, test_accuracy

    def attack(self, target: GnnModel, graph: GraphDataset, attack_type: str, architecture: str,
               name: str = "surrogate", epochs: int = Config.MAX_EPOCHS,
               oracle_url: Optional[str] = None) -> SurrogateModel:
        """Ekstrakcja surogatu z D_s przez wyrocznię (w procesie albo HTTP)"""
        split = self.split(graph)
        seed = derive_seed(self.seed, "attack", name)
        cfg = AttackConfig(attack_type=attack_type, surrogate_architecture=architecture, epochs=epochs, seed=seed)
        oracle = HttpOracle(oracle_url, seed=seed) if oracle_url else InProcessOracle(target, seed=seed)
        surrogate = run_extraction(oracle, graph.subgraph(split.surrogate_train), cfg)
        save_model(surrogate.model, self.model_path(name))
        logger.info(f"Surogat {name}: {surrogate.summary()}")
        return surrogate

    def cohort(self, target: GnnModel, graph: GraphDataset, surrogates: Sequence[Tuple[str, GnnModel]],
               independents: Sequence[Tuple[str, GnnModel]], prune_ratios: Sequence[float] = (),
               name: str = "csim-training-set") -> Tuple[FingerprintTrainingSet, str]:
        """Zbiór treningowy C_sim (opcjonalnie rozszerzony o przycięte surogaty) zapisany jako CSV"""
        split = self.split(graph)
        training_set = build_training_set(target, list(surrogates), list(independents), graph,
                                          split.verification, seed=self.seed)
        if prune_ratios:
            training_set = build_robust_training_set(training_set, target, list(surrogates), prune_ratios,
                                                     graph, split.verification, seed=self.seed)
        path = os.path.join(self.paths["models"], f"{name}.csv")
        training_set.to_csv(path)
        return training_set, path

    def fingerprint_train(self, training_set: FingerprintTrainingSet, name: str = "csim") -> Tuple[SimilarityClassifier, str]:
        csim = train_csim(training_set, seed=derive_seed(self.seed, "csim", name))
        path = csim.save(os.path.join(self.paths["models"], f"{name}.joblib"))
        logger.info(f"C_sim {name}: {csim.describe()}")
        return csim, path

    def fingerprint_verify(self, csim: SimilarityClassifier, target: GnnModel, suspect: GnnModel,
                           graph: GraphDataset, name: str = "verdict") -> Tuple[VerdictReport, str]:
        split = self.split(graph)
        report = verify(csim, target, suspect, graph, split.verification, seed=self.seed)
        report.verification_digest = split.digest()
        path = os.path.join(self.paths["verdicts"], f"{name}.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write(report.to_json())
        return report, path

    # Rejestr

    @property
    def registry(self) -> ModelRegistry:
        if self._registry is None:
            self._registry = ModelRegistry(self.registry_dir)
        return self._registry

    def register(self, model: GnnModel, owner_id: str, csim: Optional[SimilarityClassifier] = None) -> RegistryRecord:
        record = self.registry.register(model_to_bytes(model), owner_id)
        if csim is not None:
            self.registry.attach_csim(record.model_id, csim)
        return record

    def dispute(self, accuser_id: str, responder_id: str, target: GnnModel, suspect: GnnModel,
                graph: Optional[GraphDataset] = None) -> Dispute:
        """Otwórz spór i, jeśli podano graf weryfikatora, od razu go rozstrzygnij"""
        dispute = open_dispute(
            self.registry,
            self.registry.get(accuser_id),
            self.registry.get(responder_id),
            model_to_bytes(target),
            model_to_bytes(suspect),
        )
        if graph is None or dispute.status.terminal:
            return dispute
        split = self.split(graph)
        return resolve(self.registry, dispute, self.registry.load_csim(accuser_id), graph,
                       split.verification, seed=self.seed, verification_digest=split.digest())

    def serve(self, graph: Optional[GraphDataset] = None, host: str = Config.HOST,
              port: int = Config.PORT) -> RegistryServer:
        split = self.split(graph) if graph is not None else None
        return RegistryServer(
            self.registry,
            graph=graph,
            d_v=split.verification if split is not None else None,
            host=host,
            port=port,
            verification_digest=split.digest() if split is not None else None,
        )

    # Wykresy

    def plot_projection(self, models: Dict[str, GnnModel], graph: GraphDataset, method: str = "pca",
                        name: str = "projection") -> Tuple[str, str]:
        split = self.split(graph)
        sets = {label: forward(model, graph, split.verification, self.seed)[0] for label, model in models.items()}
        return GraphVisualizer.emit_projection_plot(sets, os.path.join(self.paths["plots"], name),
                                                    method=method, seed=self.seed)

    def plot_distances(self, target: GnnModel, others: List[Tuple[str, str, GnnModel]], graph: GraphDataset,
                       name: str = "distances") -> Tuple[str, str]:
        split = self.split(graph)
        return GraphVisualizer.emit_distance_histogram(target, others, graph, split.verification,
                                                       os.path.join(self.paths["plots"], name), seed=self.seed)

