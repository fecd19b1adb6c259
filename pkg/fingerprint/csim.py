"""
C_sim: dwuwarstwowy MLP klasyfikujący pary embeddingów jako podobne / niepodobne
"""
import logging
import os
import warnings
from dataclasses import dataclass, field
from typing import Dict, Any, List, Sequence

import joblib
import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.model_selection import GridSearchCV, StratifiedKFold
from sklearn.neural_network import MLPClassifier
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import StandardScaler

from config.settings import Config
from core.exceptions import FingerprintError
from .training_set import FingerprintTrainingSet

logger = logging.getLogger(__name__)


@dataclass
class SimilarityClassifier:
    """Wytrenowany C_sim wraz z wybraną komórką siatki i wynikiem walidacji krzyżowej"""
    estimator: Pipeline
    hidden_dim: int
    activation: str
    cv_accuracy: float
    embedding_dim: int
    threshold: float = Config.PAIR_THRESHOLD
    grid: List[Dict[str, Any]] = field(default_factory=list)

    def _check(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.embedding_dim:
            raise FingerprintError(f"embedding dimension mismatch: C_sim expects {self.embedding_dim}, got {X.shape[1]}")
        return X

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """P(podobne) dla każdego wektora odległości"""
        X = self._check(X)
        positive = list(self.estimator.classes_).index(1)
        return self.estimator.predict_proba(X)[:, positive]

    def decide(self, X: np.ndarray) -> np.ndarray:
        return self.predict_proba(X) > self.threshold

    def describe(self) -> Dict[str, Any]:
        return {
            "hidden_dim": self.hidden_dim,
            "activation": self.activation,
            "cv_accuracy": self.cv_accuracy,
            "embedding_dim": self.embedding_dim,
            "threshold": self.threshold,
        }

    def save(self, path: str) -> str:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        joblib.dump(self, path)
        return path

    @staticmethod
    def load(path: str) -> "SimilarityClassifier":
        classifier = joblib.load(path)
        if not isinstance(classifier, SimilarityClassifier):
            raise FingerprintError(f"{path} does not hold a similarity classifier")
        return classifier


def _select_best(cv_results: Dict[str, Any]) -> int:
    """Najwyższa średnia dokładność CV; remis -> mniejsza warstwa ukryta, potem kolejność siatki"""
    scores = np.asarray(cv_results["mean_test_score"])
    hidden = [params["mlp__hidden_layer_sizes"][0] for params in cv_results["params"]]
    return min(range(len(scores)), key=lambda i: (-scores[i], hidden[i], i))


def train_csim(training_set: FingerprintTrainingSet, seed: int = 0,
               hidden_grid: Sequence[int] = Config.CSIM_HIDDEN_GRID,
               activations: Sequence[str] = Config.CSIM_ACTIVATIONS,
               cv_folds: int = Config.CSIM_CV_FOLDS,
               max_iter: int = Config.CSIM_MAX_ITER,
               n_jobs: int = 1) -> SimilarityClassifier:
    """
    Przeszukanie siatki (rozmiar warstwy ukrytej x aktywacja) z k-krotną walidacją
    krzyżową, a następnie ponowne dopasowanie najlepszego modelu na całym zbiorze
    """
    labels = training_set.labels
    classes, class_counts = np.unique(labels, return_counts=True)
    if classes.size < 2:
        raise FingerprintError("single-label training set: C_sim needs positive and negative rows")
    folds = min(cv_folds, int(class_counts.min()))
    if folds < 2:
        raise FingerprintError("each label needs at least two rows for cross-validation")

    pipeline = Pipeline([
        ("scale", StandardScaler()),
        ("mlp", MLPClassifier(max_iter=max_iter, random_state=seed)),
    ])
    search = GridSearchCV(
        pipeline,
        param_grid={
            "mlp__hidden_layer_sizes": [(int(h),) for h in hidden_grid],
            "mlp__activation": list(activations),
        },
        scoring="accuracy",
        cv=StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed),
        refit=_select_best,
        n_jobs=n_jobs,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=ConvergenceWarning)
        search.fit(training_set.features, labels)

    best = search.best_index_
    params = search.cv_results_["params"][best]
    grid = [
        {
            "hidden_dim": p["mlp__hidden_layer_sizes"][0],
            "activation": p["mlp__activation"],
            "mean_cv_accuracy": float(score),
        }
        for p, score in zip(search.cv_results_["params"], search.cv_results_["mean_test_score"])
    ]
    classifier = SimilarityClassifier(
        estimator=search.best_estimator_,
        hidden_dim=params["mlp__hidden_layer_sizes"][0],
        activation=params["mlp__activation"],
        cv_accuracy=float(search.cv_results_["mean_test_score"][best]),
        embedding_dim=training_set.embedding_dim,
        grid=grid,
    )
    logger.info(
        f"C_sim: hidden={classifier.hidden_dim}, activation={classifier.activation}, "
        f"CV acc={classifier.cv_accuracy:.3f} ({folds}-fold, {len(training_set)} wierszy)"
    )
    return classifier
