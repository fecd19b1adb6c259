"""
Trening indukcyjny i dostrajanie modeli GNN
"""
import copy
import logging
import time
from dataclasses import dataclass, asdict
from typing import Dict, Any, Optional, Tuple

import numpy as np
import torch
import torch.nn.functional as F

from data.graph_dataset import GraphDataset
from .config import GnnConfig
from .model import GnnModel, build_model

logger = logging.getLogger(__name__)

_VALIDATION_STREAM = 2 ** 31


@dataclass
class TrainReport:
    """Podsumowanie przebiegu treningu"""
    epochs_run: int
    final_train_loss: float
    validation_accuracy: float
    wall_time_seconds: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def epoch_rng(seed: int, epoch: int) -> np.random.Generator:
    """Osobny strumień losowy na epokę (próbkowanie sąsiadów, kolejność batchy)"""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(epoch)]))


def _batches(nodes: np.ndarray, batch_size: int, rng: np.random.Generator):
    order = rng.permutation(nodes)
    return [order[i:i + batch_size] for i in range(0, order.size, batch_size)]


def _accuracy(logits: torch.Tensor, labels: torch.Tensor, nodes: np.ndarray) -> float:
    index = torch.from_numpy(nodes)
    return float((logits[index].argmax(dim=1) == labels[index]).double().mean())


def _carve_validation(count: int, config: GnnConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Podział lokalnych indeksów na część uczącą i walidacyjną"""
    order = epoch_rng(config.seed, _VALIDATION_STREAM).permutation(count)
    if config.early_stop_patience is None:
        return np.sort(order), np.zeros(0, dtype=np.int64)
    n_val = int(round(config.validation_fraction * count))
    n_val = min(max(n_val, 1), count - 1)
    return np.sort(order[n_val:]), np.sort(order[:n_val])


def fit(model: GnnModel, graph: GraphDataset, fit_nodes: np.ndarray, val_nodes: np.ndarray,
        epochs: int, early_stop_patience: Optional[int], seed: int) -> TrainReport:
    """
    Pętla uczenia Adam + entropia krzyżowa na grafie `graph`

    Walidacja (jeśli jest) wybiera najlepszy stan i zatrzymuje trening po
    `early_stop_patience` epokach bez poprawy.
    """
    config = model.config
    started = time.perf_counter()
    x = torch.from_numpy(graph.features)
    y = torch.from_numpy(graph.labels)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    generator = torch.Generator().manual_seed(int(seed))
    use_validation = early_stop_patience is not None and val_nodes.size > 0

    best_accuracy, best_state, stale = -1.0, None, 0
    epochs_run, epoch_loss = 0, float("nan")
    for epoch in range(epochs):
        rng = epoch_rng(seed, epoch)
        blocks = model.sample_blocks(graph.adjacency, rng)
        losses = []
        for batch in _batches(fit_nodes, config.batch_size, rng):
            optimizer.zero_grad()
            _, logits = model(x, blocks, generator=generator)
            index = torch.from_numpy(batch)
            loss = F.cross_entropy(logits[index], y[index])
            loss.backward()
            optimizer.step()
            losses.append(float(loss.detach()))
        epochs_run += 1
        epoch_loss = float(np.mean(losses))

        if not use_validation:
            logger.debug(f"epoka {epoch}: loss={epoch_loss:.4f}")
            continue
        with torch.no_grad():
            _, logits = model(x, blocks)
        accuracy = _accuracy(logits, y, val_nodes)
        logger.debug(f"epoka {epoch}: loss={epoch_loss:.4f} val_acc={accuracy:.4f}")
        if accuracy > best_accuracy:
            best_accuracy, stale = accuracy, 0
            best_state = copy.deepcopy(model.state_dict())
        else:
            stale += 1
            if stale >= early_stop_patience:
                break

    if best_state is not None:
        model.load_state_dict(best_state)
    if not use_validation:
        with torch.no_grad():
            _, logits = model(x, model.sample_blocks(graph.adjacency, epoch_rng(seed, epochs)))
        best_accuracy = _accuracy(logits, y, fit_nodes)

    return TrainReport(
        epochs_run=epochs_run,
        final_train_loss=epoch_loss,
        validation_accuracy=best_accuracy,
        wall_time_seconds=time.perf_counter() - started,
    )


def _training_subgraph(graph: GraphDataset, nodes) -> Tuple[GraphDataset, np.ndarray]:
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    if nodes.size == 0:
        raise ValueError("empty training node set")
    return graph.subgraph(nodes), nodes


def train(config: GnnConfig, graph: GraphDataset, train_nodes) -> Tuple[GnnModel, TrainReport]:
    """
    Wytrenuj model indukcyjnie na podgrafie indukowanym przez `train_nodes`

    Args:
        config: hiperparametry (ziarno steruje inicjalizacją, próbkowaniem i dropoutem)
        graph: pełny graf
        train_nodes: węzły treningowe (10% trafia do walidacji dla early stopping)
    """
    subgraph, nodes = _training_subgraph(graph, train_nodes)
    if np.unique(subgraph.labels).size < 2:
        raise ValueError("single-class training set")

    model = build_model(config, graph.feature_dim, graph.num_classes)
    fit_nodes, val_nodes = _carve_validation(subgraph.node_count, config)
    report = fit(model, subgraph, fit_nodes, val_nodes, config.max_epochs, config.early_stop_patience, config.seed)
    logger.info(
        f"Wytrenowano {config.architecture.value} na {nodes.size} węzłach: "
        f"{report.epochs_run} epok, loss={report.final_train_loss:.4f}, "
        f"val_acc={report.validation_accuracy:.3f}, {report.wall_time_seconds:.1f}s"
    )
    return model, report


def fine_tune(model: GnnModel, graph: GraphDataset, nodes, epochs: int,
              exclude=None, seed: Optional[int] = None) -> GnnModel:
    """
    Dostrajanie end-to-end (warstwy GNN i głowica) na nowych węzłach

    Zwraca nowy model; oryginał pozostaje bez zmian. `exclude` to węzły
    oryginalnego treningu, o ile są znane (muszą być rozłączne z `nodes`).
    """
    if epochs <= 0:
        raise ValueError("epochs must be positive")
    subgraph, nodes = _training_subgraph(graph, nodes)
    if exclude is not None and np.intersect1d(nodes, np.asarray(exclude, dtype=np.int64)).size:
        raise ValueError("fine-tuning nodes overlap the model's original training nodes")

    tuned = copy.deepcopy(model)
    seed = tuned.config.seed + 1 if seed is None else seed
    fit(tuned, subgraph, np.arange(subgraph.node_count), np.zeros(0, dtype=np.int64), epochs, None, seed)
    logger.info(f"Dostrojono model na {nodes.size} węzłach przez {epochs} epok")
    return tuned
