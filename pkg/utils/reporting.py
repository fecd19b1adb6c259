"""
Układ katalogu wyników i zapis tabel (Markdown + CSV)
"""
import logging
import os
from typing import Dict, TYPE_CHECKING

from config.settings import Config

if TYPE_CHECKING:
    from harness.metrics import MetricsTable

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.jsonl"


def output_layout(out_dir: str) -> Dict[str, str]:
    """Utwórz `models/`, `verdicts/`, `tables/`, `plots/` i zwróć ścieżki (plus manifest)"""
    paths = {name: os.path.join(out_dir, name) for name in Config.OUTPUT_LAYOUT}
    for path in paths.values():
        os.makedirs(path, exist_ok=True)
    paths["manifest"] = os.path.join(out_dir, MANIFEST_FILE)
    return paths


def write_table(table: "MetricsTable", tables_dir: str, name: str = "metrics") -> Dict[str, str]:
    """Zapisz tabelę jako CSV (liczby) i Markdown (średnia ± połowa przedziału)"""
    os.makedirs(tables_dir, exist_ok=True)
    csv_path = os.path.join(tables_dir, f"{name}.csv")
    md_path = os.path.join(tables_dir, f"{name}.md")
    table.to_frame().to_csv(csv_path, index=False)
    with open(md_path, "w", encoding="utf-8") as f:
        f.write(table.to_markdown())
    logger.info(f"Zapisano tabelę {csv_path}")
    return {"csv": csv_path, "markdown": md_path}
