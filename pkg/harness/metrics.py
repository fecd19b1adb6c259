"""
Metryki: dokładność, wierność, FPR/FNR, przedziały ufności i tabela wyników
"""
import math
from dataclasses import dataclass, field
from typing import Dict, Any, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config.settings import Config

RATE_METRICS = ("accuracy", "fidelity", "fpr", "fnr")
TIMING_METRICS = ("target_train_seconds", "csim_pipeline_seconds")


def _pair(a, b) -> Tuple[np.ndarray, np.ndarray]:
    a, b = np.asarray(a).reshape(-1), np.asarray(b).reshape(-1)
    if a.size == 0 or b.size == 0:
        raise ValueError("empty label vector")
    if a.shape != b.shape:
        raise ValueError(f"label vectors differ in length: {a.size} vs {b.size}")
    return a, b


def accuracy(pred, truth) -> float:
    """Odsetek trafionych etykiet"""
    pred, truth = _pair(pred, truth)
    return float(np.mean(pred == truth))


def fidelity(pred_a, pred_b) -> float:
    """Odsetek pozycji, na których dwa modele zgadzają się co do etykiety"""
    pred_a, pred_b = _pair(pred_a, pred_b)
    return float(np.mean(pred_a == pred_b))


def _kind(value) -> str:
    return getattr(value, "value", value)


def fpr_fnr(verdicts: Iterable[Tuple[Any, Any]]) -> Tuple[Optional[float], Optional[float]]:
    """
    (FPR, FNR) z par (prawda, werdykt) o wartościach surrogate / independent

    Stopa bez mianownika (brak niezależnych lub surogatów) to None, nigdy 0.
    """
    fp = tn = fn = tp = 0
    for truth, verdict in verdicts:
        truth, verdict = _kind(truth), _kind(verdict)
        if truth == "independent":
            fp += verdict == "surrogate"
            tn += verdict != "surrogate"
        elif truth == "surrogate":
            tp += verdict == "surrogate"
            fn += verdict != "surrogate"
        else:
            raise ValueError(f"unknown ground truth {truth}")
    fpr = fp / (fp + tn) if fp + tn else None
    fnr = fn / (fn + tp) if fn + tp else None
    return fpr, fnr


def mean_ci(values: Sequence[Optional[float]], z: float = Config.CI_Z) -> Tuple[Optional[float], Optional[float]]:
    """Średnia i połowa szerokości przedziału ufności (z * błąd standardowy); None gdy n < 2"""
    clean = [float(v) for v in values if v is not None]
    if not clean:
        return None, None
    mean = float(np.mean(clean))
    if len(clean) < 2:
        return mean, None
    return mean, float(z * np.std(clean, ddof=1) / math.sqrt(len(clean)))


def format_cell(mean: Optional[float], half: Optional[float]) -> str:
    if mean is None:
        return "n/a"
    if half is None:
        return f"{mean:.3f}"
    return f"{mean:.3f} ± {half:.3f}"


@dataclass
class MetricsTable:
    """
    Wiersze per warunek eksperymentu z metrykami z każdego powtórzenia

    Każda komórka tabeli jest średnią (i przedziałem) z wartości per powtórzenie,
    odczytanych z manifestu przebiegu.
    """
    samples: Dict[str, Dict[str, List[Optional[float]]]] = field(default_factory=dict)

    def add(self, condition: str, metric: str, value: Optional[float]) -> None:
        if metric in RATE_METRICS and value is not None and not 0.0 <= value <= 1.0:
            raise ValueError(f"{metric} must lie in [0, 1], got {value}")
        self.samples.setdefault(condition, {}).setdefault(metric, []).append(value)

    def conditions(self) -> List[str]:
        return sorted(self.samples)

    def cell(self, condition: str, metric: str) -> Tuple[Optional[float], Optional[float]]:
        return mean_ci(self.samples.get(condition, {}).get(metric, []))

    def to_frame(self, include_timing: bool = True) -> pd.DataFrame:
        metrics = list(RATE_METRICS) + (list(TIMING_METRICS) if include_timing else [])
        rows = []
        for condition in self.conditions():
            row = {"condition": condition}
            for metric in metrics:
                mean, half = self.cell(condition, metric)
                row[f"{metric}_mean"] = mean
                row[f"{metric}_ci"] = half
            rows.append(row)
        return pd.DataFrame(rows)

    def metrics_frame(self) -> pd.DataFrame:
        """Tabela bez kolumn czasowych (porównywalna między przebiegami)"""
        return self.to_frame(include_timing=False)

    def to_markdown(self) -> str:
        """Tabela Markdown: średnia ± połowa 95% przedziału, `n/a` dla pustych komórek"""
        metrics = list(RATE_METRICS) + list(TIMING_METRICS)
        frame = pd.DataFrame(
            [[condition] + [format_cell(*self.cell(condition, metric)) for metric in metrics]
             for condition in self.conditions()],
            columns=["condition"] + metrics,
        )
        return frame.to_markdown(index=False, tablefmt="github", disable_numparse=True) + "\n"
