"""
Wykresy eksperymentów: projekcje embeddingów, histogramy odległości, przycinanie

Każdy wykres zapisywany jest jako PNG wraz z CSV surowych punktów, tak aby dało się
go sprawdzić bez patrzenia na obraz.
"""
import logging
import os
from typing import Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from sklearn.decomposition import PCA  # noqa: E402
from sklearn.manifold import TSNE  # noqa: E402

from data.graph_dataset import GraphDataset  # noqa: E402
from fingerprint.distance import euclidean_distances  # noqa: E402
from gnn.model import GnnModel, forward  # noqa: E402

logger = logging.getLogger(__name__)

PROJECTION_METHODS = ("pca", "tsne")
KIND_COLORS = {"surrogate": "#ff6b6b", "independent": "#45b7d1", "pruned-surrogate": "#96ceb4"}


def _ensure_parent(path: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)


def project_2d(points: np.ndarray, method: str = "pca", seed: int = 0) -> np.ndarray:
    """Rzut punktów na płaszczyznę (PCA deterministyczne, t-SNE opcjonalnie)"""
    if method not in PROJECTION_METHODS:
        raise ValueError(f"unknown projection method {method}: expected one of {PROJECTION_METHODS}")
    points = np.asarray(points, dtype=np.float64)
    n, dim = points.shape
    if method == "tsne":
        projected = TSNE(n_components=2, random_state=seed, init="pca",
                         perplexity=float(min(30, max(1, n - 1)))).fit_transform(points)
    else:
        components = min(2, n, dim)
        projected = PCA(n_components=components, svd_solver="full").fit_transform(points)
        if components < 2:
            projected = np.hstack([projected, np.zeros((n, 2 - components))])
    return projected


class GraphVisualizer:
    """Emitery wykresów i diagram przepływu sporu"""

    @staticmethod
    def get_static_mermaid_code() -> str:
        """Kod Mermaid dla przepływu sporu w rejestrze"""
        return """graph TD
    start([🚀 START])
    commitment["🔐 Commitment"]
    timestamp["⏱️ Timestamp"]
    opened(["📂 opened"])
    well_formed["🧱 Well-formedness"]
    fidelity["🎯 Fidelity"]
    verify["⚖️ Verification"]
    end_node([🏁 END])

    start --> commitment
    commitment -->|zgodny| timestamp
    commitment -->|niezgodny| end_node
    timestamp -->|oskarżyciel wcześniej| opened
    timestamp -->|za późno| end_node
    opened --> well_formed
    well_formed -->|poprawny| fidelity
    well_formed -->|wadliwy| end_node
    fidelity -->|zgodne wdrożenia| verify
    fidelity -->|rozbieżne| end_node
    verify --> end_node

    %% Style węzłów
    style start fill:#ffa07a,stroke:#333,color:white,stroke-width:2px
    style commitment fill:#ff6b6b,stroke:#333,color:white,stroke-width:2px
    style timestamp fill:#4ecdc4,stroke:#333,color:white,stroke-width:2px
    style well_formed fill:#45b7d1,stroke:#333,color:white,stroke-width:2px
    style fidelity fill:#96ceb4,stroke:#333,color:white,stroke-width:2px
    style verify fill:#f7b267,stroke:#333,color:white,stroke-width:2px
    style end_node fill:#dda0dd,stroke:#333,color:white,stroke-width:2px"""

    @staticmethod
    def export_to_html(filename: str) -> str:
        """Zapisz diagram przepływu sporu jako samodzielną stronę HTML"""
        html = f"""<!DOCTYPE html>
<html lang="pl">
<head>
    <meta charset="UTF-8">
    <title>Rejestr modeli - przepływ sporu</title>
    <script src="https://cdn.jsdelivr.net/npm/mermaid@10.6.1/dist/mermaid.min.js"></script>
</head>
<body>
    <div class="mermaid">
{GraphVisualizer.get_static_mermaid_code()}
    </div>
    <script>mermaid.initialize({{ startOnLoad: true, theme: 'default' }});</script>
</body>
</html>
"""
        _ensure_parent(filename)
        with open(filename, "w", encoding="utf-8") as f:
            f.write(html)
        return filename

    @staticmethod
    def emit_projection_plot(embedding_sets: Dict[str, np.ndarray], path_prefix: str,
                             method: str = "pca", seed: int = 0,
                             title: str = "Projekcja embeddingów") -> Tuple[str, str]:
        """
        Wspólny rzut 2-D zbiorów embeddingów, kolor według modelu źródłowego

        Returns:
            (ścieżka PNG, ścieżka CSV z kolumnami model, x, y)
        """
        labels: List[str] = []
        blocks = []
        for name, embeddings in embedding_sets.items():
            embeddings = np.atleast_2d(np.asarray(embeddings, dtype=np.float64))
            blocks.append(embeddings)
            labels.extend([name] * embeddings.shape[0])
        if len(labels) < 2:
            raise ValueError("projection needs at least 2 points")
        dims = {block.shape[1] for block in blocks}
        if len(dims) != 1:
            raise ValueError(f"embedding sets disagree on dimension: {sorted(dims)}")

        projected = project_2d(np.vstack(blocks), method, seed)
        frame = pd.DataFrame({"model": labels, "x": projected[:, 0], "y": projected[:, 1]})

        png_path, csv_path = f"{path_prefix}.png", f"{path_prefix}.csv"
        _ensure_parent(png_path)
        frame.to_csv(csv_path, index=False)
        fig, ax = plt.subplots(figsize=(6, 5))
        for name, group in frame.groupby("model", sort=False):
            ax.scatter(group["x"], group["y"], s=12, alpha=0.6, label=name)
        ax.set_title(f"{title} ({method.upper()})")
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        fig.savefig(png_path, dpi=120)
        plt.close(fig)
        logger.info(f"Zapisano projekcję {png_path}")
        return png_path, csv_path

    @staticmethod
    def emit_distance_histogram(target: GnnModel, others: Sequence[Tuple[str, str, GnnModel]],
                                graph: GraphDataset, d_v, path_prefix: str, seed: int = 0,
                                bins: int = 30) -> Tuple[str, str]:
        """
        Histogramy odległości euklidesowych (cel, inny model) węzeł po węźle

        Args:
            others: trójki (identyfikator, rodzaj: surrogate / independent, model)

        Returns:
            (ścieżka PNG, ścieżka CSV z kolumnami other_id, kind, node_id, distance)
        """
        d_v = np.asarray(d_v, dtype=np.int64)
        H_target, _ = forward(target, graph, d_v, seed)
        rows = []
        for other_id, kind, model in others:
            H_other, _ = forward(model, graph, d_v, seed)
            for node, distance in zip(d_v, euclidean_distances(H_target, H_other)):
                rows.append({"other_id": other_id, "kind": kind, "node_id": int(node), "distance": float(distance)})
        frame = pd.DataFrame(rows, columns=["other_id", "kind", "node_id", "distance"])

        png_path, csv_path = f"{path_prefix}.png", f"{path_prefix}.csv"
        _ensure_parent(png_path)
        frame.to_csv(csv_path, index=False)
        fig, ax = plt.subplots(figsize=(6, 4))
        if not frame.empty:
            edges = np.histogram_bin_edges(frame["distance"], bins=bins)
            for kind, group in frame.groupby("kind", sort=False):
                ax.hist(group["distance"], bins=edges, alpha=0.5, density=True,
                        label=kind, color=KIND_COLORS.get(kind))
        ax.set_xlabel("odległość euklidesowa")
        ax.set_ylabel("gęstość")
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        fig.savefig(png_path, dpi=120)
        plt.close(fig)
        logger.info(f"Zapisano histogram odległości {png_path}")
        return png_path, csv_path

    @staticmethod
    def emit_pruning_plot(sweep: pd.DataFrame, path_prefix: str) -> Tuple[str, str]:
        """
        Dokładność (kropkowana) i FNR (ciągła) w funkcji współczynnika przycięcia

        Args:
            sweep: kolumny ratio, csim (basic / robust), accuracy, fnr
        """
        png_path, csv_path = f"{path_prefix}.png", f"{path_prefix}.csv"
        _ensure_parent(png_path)
        sweep = sweep.sort_values(["csim", "ratio"])
        sweep.to_csv(csv_path, index=False)
        fig, ax = plt.subplots(figsize=(6, 4))
        for csim_kind, group in sweep.groupby("csim"):
            line = ax.plot(group["ratio"], group["fnr"], linestyle="-", marker="o", label=f"FNR ({csim_kind})")
            ax.plot(group["ratio"], group["accuracy"], linestyle=":", color=line[0].get_color(),
                    label=f"dokładność ({csim_kind})")
        ax.set_xlabel("współczynnik przycięcia")
        ax.set_ylim(-0.05, 1.05)
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        fig.savefig(png_path, dpi=120)
        plt.close(fig)
        return png_path, csv_path


def centroid_distances(projection: pd.DataFrame, reference: str) -> Dict[str, float]:
    """Odległości centroidów 2-D każdego modelu od centroidu modelu referencyjnego"""
    centroids = projection.groupby("model")[["x", "y"]].mean()
    if reference not in centroids.index:
        raise ValueError(f"unknown reference model {reference}")
    origin = centroids.loc[reference].to_numpy()
    return {
        str(name): float(np.linalg.norm(row.to_numpy() - origin))
        for name, row in centroids.iterrows() if name != reference
    }


def overlap_coefficient(a: Sequence[float], b: Sequence[float], bins: int = 30) -> Optional[float]:
    """Pole wspólne dwóch znormalizowanych histogramów (0 = rozłączne, 1 = identyczne)"""
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        return None
    edges = np.histogram_bin_edges(np.concatenate([a, b]), bins=bins)
    hist_a, _ = np.histogram(a, bins=edges)
    hist_b, _ = np.histogram(b, bins=edges)
    return float(np.minimum(hist_a / a.size, hist_b / b.size).sum())

