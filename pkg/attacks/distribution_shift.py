"""
Opcjonalny atak przesunięcia rozkładu: surogat uczony jak generator przeciw
dyskryminatorowi odróżniającemu jego embeddingi od standardowego rozkładu normalnego
"""
import logging
import time
from dataclasses import dataclass, asdict
from typing import Dict, Any, Tuple

import numpy as np
import torch
import torch.nn.functional as F
from scipy import stats
from torch import nn

from config.settings import Config
from data.graph_dataset import GraphDataset
from gnn.model import init_parameters
from gnn.training import epoch_rng
from .extraction import AttackConfig, SurrogateModel, node_batches, prepare_attack, classifier_step, row_21_loss
from .oracle import QueryOracle

logger = logging.getLogger(__name__)


class Discriminator(nn.Module):
    """3-warstwowy MLP: logit "próbka z N(0, I)" """

    def __init__(self, embedding_dim: int, hidden_dim: int = Config.DISCRIMINATOR_HIDDEN):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(embedding_dim, hidden_dim),
            nn.ReLU(),
            nn.Linear(hidden_dim, hidden_dim),
            nn.ReLU(),
            nn.Linear(hidden_dim, 1),
        )

    def forward(self, h: torch.Tensor) -> torch.Tensor:
        return self.net(h).squeeze(-1)


@dataclass
class GaussianScreen:
    """Test zgodności wszystkich współrzędnych embeddingów z N(0, 1)"""
    mean: float
    std: float
    ks_statistic: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def gaussian_screen(embeddings: np.ndarray, max_statistic: float = 0.05) -> GaussianScreen:
    values = np.asarray(embeddings, dtype=np.float64).reshape(-1)
    statistic = float(stats.kstest(values, "norm").statistic)
    return GaussianScreen(
        mean=float(values.mean()),
        std=float(values.std()),
        ks_statistic=statistic,
        passed=statistic < max_statistic,
    )


def _discriminator_step(discriminator: Discriminator, optimizer: torch.optim.Optimizer,
                        fake: torch.Tensor, generator: torch.Generator) -> float:
    real = torch.randn(fake.shape, generator=generator)
    optimizer.zero_grad()
    logits = torch.cat([discriminator(real), discriminator(fake)])
    labels = torch.cat([torch.ones(real.shape[0]), torch.zeros(fake.shape[0])])
    loss = F.binary_cross_entropy_with_logits(logits, labels)
    loss.backward()
    optimizer.step()
    return float(loss.detach())


def discriminator_accuracy(discriminator: Discriminator, embeddings: np.ndarray, seed: int = 0) -> float:
    """Dokładność na zbalansowanym zbiorze: embeddingi vs świeże próbki N(0, I)"""
    fake = torch.as_tensor(np.asarray(embeddings, dtype=np.float32))
    real = torch.randn(fake.shape, generator=torch.Generator().manual_seed(int(seed) + 1))
    with torch.no_grad():
        hits = (discriminator(real) > 0).sum() + (discriminator(fake) <= 0).sum()
    return float(hits) / (2 * fake.shape[0])


def train_discriminator(embeddings: np.ndarray, seed: int = 0, epochs: int = 200,
                        hidden_dim: int = Config.DISCRIMINATOR_HIDDEN) -> Tuple[Discriminator, float]:
    """Samodzielny trening dyskryminatora (kontrola sensowności przed treningiem łącznym)"""
    torch_generator = torch.Generator().manual_seed(int(seed))
    fake = torch.as_tensor(np.asarray(embeddings, dtype=np.float32))
    discriminator = init_parameters(Discriminator(fake.shape[1], hidden_dim), seed)
    optimizer = torch.optim.Adam(discriminator.parameters(), lr=Config.LEARNING_RATE)
    for _ in range(epochs):
        _discriminator_step(discriminator, optimizer, fake, torch_generator)
    return discriminator, discriminator_accuracy(discriminator, embeddings, seed)


def distribution_shift_attack(oracle: QueryOracle, ds: GraphDataset, cfg: AttackConfig,
                              fidelity_weight: float = 1.0,
                              adversarial_weight: float = Config.ADVERSARIAL_WEIGHT) -> SurrogateModel:
    """
    Ekstrakcja z dodatkowym członem adwersarialnym

    Strata generatora: fidelity_weight * L_R + adversarial_weight * BCE(D(H_s), "gaussowski").
    fidelity_weight = 0 daje wariant ablacyjny bez członu wierności.
    """
    started = time.perf_counter()
    structure, H_t, model = prepare_attack(oracle, ds, cfg)
    x = torch.from_numpy(ds.features)
    y = torch.from_numpy(ds.labels)
    target = torch.from_numpy(H_t)
    discriminator = init_parameters(Discriminator(H_t.shape[1]), cfg.seed)
    gnn_optimizer = torch.optim.Adam(model.layers.parameters(), lr=cfg.learning_rate)
    head_optimizer = torch.optim.Adam(model.head.parameters(), lr=cfg.learning_rate)
    disc_optimizer = torch.optim.Adam(discriminator.parameters(), lr=cfg.learning_rate)
    generator = torch.Generator().manual_seed(int(cfg.seed))
    surrogate = SurrogateModel(model=model, attack_config=cfg, query_count=ds.node_count)

    for epoch in range(cfg.epochs):
        rng = epoch_rng(cfg.seed, epoch)
        blocks = model.sample_blocks(structure, rng)
        batches = node_batches(ds.node_count, cfg.batch_size, rng)

        with torch.no_grad():
            current = model.embed(x, blocks)
        disc_loss = _discriminator_step(discriminator, disc_optimizer, current, generator)

        losses = []
        for batch in batches:
            index = torch.from_numpy(batch)
            gnn_optimizer.zero_grad()
            embeddings = model.embed(x, blocks, generator=generator)[index]
            adversarial = F.binary_cross_entropy_with_logits(
                discriminator(embeddings), torch.ones(embeddings.shape[0])
            )
            loss = fidelity_weight * row_21_loss(embeddings, target[index]) + adversarial_weight * adversarial
            loss.backward()
            gnn_optimizer.step()
            losses.append(float(loss.detach()))
        surrogate.embedding_losses.append(float(np.mean(losses)))

        with torch.no_grad():
            frozen = model.embed(x, blocks)
        surrogate.classifier_losses.append(classifier_step(model, head_optimizer, frozen, y, batches))
        logger.debug(f"przesunięcie rozkładu epoka {epoch}: G={surrogate.embedding_losses[-1]:.4f} D={disc_loss:.4f}")

    surrogate.wall_time_seconds = time.perf_counter() - started
    logger.info(
        f"Atak przesunięcia rozkładu (fidelity_weight={fidelity_weight}, lambda={adversarial_weight}): "
        f"{surrogate.wall_time_seconds:.1f}s"
    )
    return surrogate
