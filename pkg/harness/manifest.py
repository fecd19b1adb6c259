"""
Manifest przebiegu eksperymentu (manifest.jsonl, tylko dopisywanie)

Każdy wpis to jeden etap:
    {"stage": klucz, "status": "completed" | "failed", "outputs": {...},
     "metrics": {...}, "error": str | null, "recorded_at": ISO}

Ostatni wpis dla klucza wygrywa; etap ukończony nie jest powtarzany przy wznowieniu.
"""
import json
import logging
import os
import threading
import traceback
from datetime import datetime, timezone
from typing import Dict, Any, Iterator, List, Optional

logger = logging.getLogger(__name__)

COMPLETED = "completed"
FAILED = "failed"


class RunManifest:
    """Dziennik etapów z indeksem w pamięci odtwarzanym z pliku"""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()
        self._latest: Dict[str, Dict[str, Any]] = {}
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        for entry in self.entries():
            self._latest[entry["stage"]] = entry

    def entries(self) -> Iterator[Dict[str, Any]]:
        if not os.path.exists(self.path):
            return
        with open(self.path, "r", encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    yield json.loads(line)
                except json.JSONDecodeError:
                    # przerwany zapis na końcu pliku
                    logger.warning(f"Pominięto uszkodzony wpis manifestu (linia {line_no})")

    def _append(self, entry: Dict[str, Any]) -> Dict[str, Any]:
        entry["recorded_at"] = datetime.now(timezone.utc).isoformat()
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(json.dumps(entry, sort_keys=True) + "\n")
            self._latest[entry["stage"]] = entry
        return entry

    def record(self, stage: str, metrics: Optional[Dict[str, Any]] = None,
               outputs: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        return self._append({
            "stage": stage,
            "status": COMPLETED,
            "metrics": metrics or {},
            "outputs": outputs or {},
            "error": None,
        })

    def record_failure(self, stage: str, error: BaseException) -> Dict[str, Any]:
        summary = "".join(traceback.format_exception_only(type(error), error)).strip()
        logger.error(f"Etap {stage} nie powiódł się: {summary}")
        return self._append({
            "stage": stage,
            "status": FAILED,
            "metrics": {},
            "outputs": {},
            "error": summary,
            "traceback": traceback.format_tb(error.__traceback__)[-3:],
        })

    def completed(self, stage: str) -> Optional[Dict[str, Any]]:
        entry = self._latest.get(stage)
        return entry if entry is not None and entry["status"] == COMPLETED else None

    def latest(self) -> List[Dict[str, Any]]:
        """Ostatni wpis każdego etapu, w kolejności kluczy"""
        with self._lock:
            return [self._latest[key] for key in sorted(self._latest)]

    def failures(self) -> List[Dict[str, Any]]:
        return [entry for entry in self.latest() if entry["status"] == FAILED]

    def with_prefix(self, prefix: str) -> List[Dict[str, Any]]:
        return [entry for entry in self.latest() if entry["stage"].startswith(prefix) and entry["status"] == COMPLETED]
