"""
Konfiguracja modeli GNN (GraphSAGE / GAT / GIN)
"""
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Dict, Any, List, Optional

from config.settings import Config


class Architecture(str, Enum):
    SAGE = "GraphSAGE"
    GAT = "GAT"
    GIN = "GIN"

    @classmethod
    def parse(cls, value) -> "Architecture":
        if isinstance(value, cls):
            return value
        aliases = {"sage": cls.SAGE, "graphsage": cls.SAGE, "gat": cls.GAT, "gin": cls.GIN}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown architecture: {value}")


@dataclass
class GnnConfig:
    """Hiperparametry modelu i treningu"""
    architecture: Architecture
    num_layers: int
    neighbor_samples: List[int]
    hidden_dim: int = Config.HIDDEN_DIM
    attention_heads: int = 4
    dropout: float = 0.0
    learning_rate: float = Config.LEARNING_RATE
    max_epochs: int = Config.MAX_EPOCHS
    early_stop_patience: Optional[int] = Config.EARLY_STOP_PATIENCE
    activation: str = "relu"
    seed: int = 0
    head_hidden: int = 0  # 0 = pojedyncza warstwa gęsta, >0 = dwuwarstwowy MLP (surogat)
    batch_size: int = Config.BATCH_SIZE
    validation_fraction: float = Config.VALIDATION_FRACTION
    extra: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.architecture = Architecture.parse(self.architecture)
        self.neighbor_samples = [int(s) for s in self.neighbor_samples]
        self.validate()

    def validate(self) -> None:
        if self.hidden_dim <= 0:
            raise ValueError("hidden_dim must be positive")
        if len(self.neighbor_samples) != self.num_layers:
            raise ValueError("neighbor_samples length must equal num_layers")
        if any(s < 1 for s in self.neighbor_samples):
            raise ValueError("neighbor sample sizes must be positive")
        if self.activation != "relu":
            raise ValueError(f"unsupported activation: {self.activation}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")
        if self.architecture is Architecture.GAT and self.hidden_dim % self.attention_heads:
            raise ValueError("GAT hidden_dim must be divisible by attention_heads")

    @classmethod
    def for_architecture(cls, architecture, **overrides) -> "GnnConfig":
        """Domyślna konfiguracja architektury (rozmiary próbek, warstwy, dropout)"""
        architecture = Architecture.parse(architecture)
        params: Dict[str, Any] = dict(Config.ARCHITECTURE_DEFAULTS[architecture.value])
        params.update(overrides)
        if "num_layers" in overrides and "neighbor_samples" not in overrides:
            base = Config.ARCHITECTURE_DEFAULTS[architecture.value]["neighbor_samples"]
            params["neighbor_samples"] = (base + [base[-1]] * overrides["num_layers"])[:overrides["num_layers"]]
        return cls(architecture=architecture, **params)

    def replace(self, **changes) -> "GnnConfig":
        payload = self.to_dict()
        payload.update(changes)
        return GnnConfig.from_dict(payload)

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["architecture"] = self.architecture.value
        return payload

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "GnnConfig":
        return cls(**payload)
