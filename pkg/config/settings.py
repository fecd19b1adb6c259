"""
Konfiguracja systemu weryfikacji własności modeli GNN
"""
import logging
import os
from dotenv import load_dotenv

# Załaduj zmienne środowiskowe
load_dotenv()


def _env_int(key: str, default: int) -> int:
    value = os.environ.get(key)
    return int(value) if value not in (None, "") else default


def _env_float(key: str, default: float) -> float:
    value = os.environ.get(key)
    return float(value) if value not in (None, "") else default


class Config:
    """Konfiguracja systemu"""

    # Ogólne
    SEED = _env_int("GROVE_SEED", 0)
    OUT_DIR = os.environ.get("GROVE_OUT_DIR", "./runs")
    DATA_DIR = os.environ.get("GROVE_DATA_DIR", "./datasets")
    TORCH_THREADS = _env_int("GROVE_DEVICE_THREADS", 0)  # 0 = domyślna liczba wątków torch

    # Logowanie
    LOG_LEVEL = os.environ.get("GROVE_LOG_LEVEL", "INFO")
    LOG_FORMAT = "%(asctime)s %(levelname)s [%(name)s] %(message)s"

    # Podział danych: F_t train / F_s train / test / D_v
    SPLIT_FRACTIONS = (0.4, 0.4, 0.1, 0.1)

    # Graf syntetyczny (SBM) - zastępuje pełne zbiory benchmarkowe
    SYNTHETIC_DEFAULTS = {
        "nodes_per_class": 500,
        "num_classes": 4,
        "intra_edge_prob": 0.01,
        "inter_edge_prob": 0.0005,
        "feature_dim": 32,
        "feature_noise": 0.5,
        "seed": 0,
    }

    # Architektury GNN
    HIDDEN_DIM = 256
    LEARNING_RATE = 0.001
    MAX_EPOCHS = 200
    EARLY_STOP_PATIENCE = 20
    VALIDATION_FRACTION = 0.1
    BATCH_SIZE = 512
    GAT_NEGATIVE_SLOPE = 0.2

    ARCHITECTURE_DEFAULTS = {
        "GraphSAGE": {"num_layers": 2, "neighbor_samples": [25, 10], "dropout": 0.5},
        "GAT": {"num_layers": 3, "neighbor_samples": [10, 10, 10], "attention_heads": 4, "dropout": 0.0},
        "GIN": {"num_layers": 3, "neighbor_samples": [10, 10, 10], "dropout": 0.0},
    }

    # Atak ekstrakcji
    KNN_K = 5
    SURROGATE_HEAD_HIDDEN = 128
    DISCRIMINATOR_HIDDEN = 128
    ADVERSARIAL_WEIGHT = 0.1

    # C_sim
    CSIM_HIDDEN_GRID = (64, 128)
    CSIM_ACTIVATIONS = ("tanh", "relu")
    CSIM_CV_FOLDS = 10
    CSIM_MAX_ITER = 300
    PAIR_THRESHOLD = 0.5
    VERDICT_THRESHOLD = 0.5
    ROBUST_PRUNE_RATIOS = (0.1, 0.2, 0.3, 0.4)
    MAX_ROBUST_PRUNE_RATIO = 0.4
    PRUNE_SWEEP = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7)

    # Rejestr i spory
    REGISTRY_DIR = os.environ.get("GROVE_REGISTRY_DIR", "./registry")
    FIDELITY_PROBE_SIZE = 32
    FIDELITY_TOLERANCE = 1e-6
    HOST = os.environ.get("GROVE_HOST", "127.0.0.1")
    PORT = _env_int("GROVE_PORT", 8765)
    HTTP_TIMEOUT = _env_float("GROVE_HTTP_TIMEOUT", 30.0)

    # Eksperymenty
    REPEATS = 5
    CI_Z = 1.96
    COHORT = {
        "csim_surrogates": 2,
        "csim_independents": 3,
        "test_surrogates": 5,
        "test_independents": 5,
    }
    OUTPUT_LAYOUT = ("models", "verdicts", "tables", "plots")

    # Emoji dla komunikatów CLI
    STATUS_EMOJIS = {
        "ok": "✅",
        "error": "❌",
        "warning": "⚠️",
        "start": "🚀",
        "model": "🧠",
        "attack": "🕵️",
        "verdict": "⚖️",
        "table": "📊",
    }


def configure_logging(level: str = None) -> None:
    """Skonfiguruj logowanie dla skryptów wejściowych"""
    logging.basicConfig(
        level=getattr(logging, (level or Config.LOG_LEVEL).upper(), logging.INFO),
        format=Config.LOG_FORMAT,
    )
