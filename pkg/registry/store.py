"""
Rejestr modeli: append-only dziennik zdarzeń JSON-lines + indeks odtwarzany z dziennika
"""
import hashlib
import json
import logging
import os
import threading
from typing import Dict, Any, List, Optional, Protocol, Tuple

from core.exceptions import RegistryError
from fingerprint.csim import SimilarityClassifier
from gnn.model import GnnModel
from gnn.serialization import model_from_bytes
from .records import ALLOWED_TRANSITIONS, Dispute, DisputeStatus, RegistryRecord, utc_now

logger = logging.getLogger(__name__)

EVENT_LOG = "events.jsonl"


def commitment_of(model_bytes: bytes) -> str:
    return hashlib.sha256(model_bytes).hexdigest()


class Timestamper(Protocol):
    """Źródło znaczników czasu (lokalny licznik, zewnętrzna usługa, ...)"""

    def stamp(self) -> Tuple[int, str]:
        ...

    def observe(self, sequence: int) -> None:
        ...


class SequenceTimestamper:
    """Ściśle rosnący numer sekwencyjny rejestru + czas ścienny ISO-8601"""

    def __init__(self, start: int = 0):
        self._last = start
        self._lock = threading.Lock()

    def stamp(self) -> Tuple[int, str]:
        with self._lock:
            self._last += 1
            return self._last, utc_now()

    def observe(self, sequence: int) -> None:
        with self._lock:
            self._last = max(self._last, sequence)


class ModelRegistry:
    """
    Rejestr z jednym piszącym (blokada na dopisywanie do dziennika)

    Odczyty korzystają z niezmiennych rekordów w indeksie i nie biorą blokady.
    """

    def __init__(self, root: str, timestamper: Optional[Timestamper] = None):
        self.root = root
        self.timestamper = timestamper or SequenceTimestamper()
        self._lock = threading.Lock()
        self._records: Dict[str, RegistryRecord] = {}
        self._disputes: Dict[str, Dispute] = {}
        self._dispute_counter = 0
        os.makedirs(os.path.join(root, "models"), exist_ok=True)
        os.makedirs(os.path.join(root, "csim"), exist_ok=True)
        self.replay()

    @property
    def log_path(self) -> str:
        return os.path.join(self.root, EVENT_LOG)

    def _model_path(self, model_id: str) -> str:
        return os.path.join(self.root, "models", f"{model_id}.grvm")

    def _csim_path(self, model_id: str) -> str:
        return os.path.join(self.root, "csim", f"{model_id}.joblib")

    def _append(self, event: Dict[str, Any]) -> None:
        with open(self.log_path, "a", encoding="utf-8") as f:
            f.write(json.dumps(event, sort_keys=True) + "\n")

    def events(self) -> List[Dict[str, Any]]:
        if not os.path.exists(self.log_path):
            return []
        with open(self.log_path, encoding="utf-8") as f:
            return [json.loads(line) for line in f if line.strip()]

    def replay(self) -> Dict[str, int]:
        """Odbuduj indeks rekordów i sporów z dziennika zdarzeń"""
        records, disputes = {}, {}
        for event in self.events():
            if event["event"] == "register":
                record = RegistryRecord.from_dict(event["record"])
                records[record.model_id] = record
                self.timestamper.observe(record.sequence)
            elif event["event"] == "dispute":
                dispute = Dispute.from_dict(event["dispute"])
                disputes[dispute.dispute_id] = dispute
        self._records, self._disputes = records, disputes
        self._dispute_counter = len(disputes)
        return {"models": len(records), "disputes": len(disputes)}

    # Modele

    def register(self, model_bytes: bytes, owner_id: str) -> RegistryRecord:
        """Zarejestruj model (bajty muszą być poprawnym kontenerem modelu)"""
        model_from_bytes(model_bytes)
        commitment = commitment_of(model_bytes)
        with self._lock:
            sequence, registered_at = self.timestamper.stamp()
            record = RegistryRecord(
                model_id=f"m{sequence:06d}-{commitment[:12]}",
                commitment=commitment,
                sequence=sequence,
                registered_at=registered_at,
                owner_id=owner_id,
            )
            with open(self._model_path(record.model_id), "wb") as f:
                f.write(model_bytes)
            self._append({"event": "register", "record": record.to_dict()})
            self._records = {**self._records, record.model_id: record}
        logger.info(f"Zarejestrowano model {record.model_id} (właściciel {owner_id}, seq {sequence})")
        return record

    def get(self, model_id: str) -> RegistryRecord:
        try:
            return self._records[model_id]
        except KeyError:
            raise RegistryError(f"unknown model id: {model_id}")

    def records(self) -> List[RegistryRecord]:
        return sorted(self._records.values(), key=lambda r: r.sequence)

    def contains(self, record: RegistryRecord) -> bool:
        return self._records.get(record.model_id) == record

    def model_bytes(self, model_id: str) -> bytes:
        self.get(model_id)
        with open(self._model_path(model_id), "rb") as f:
            return f.read()

    def load_model(self, model_id: str) -> GnnModel:
        return model_from_bytes(self.model_bytes(model_id))

    def verify_commitment(self, record: RegistryRecord, model_bytes: bytes) -> bool:
        return commitment_of(model_bytes) == record.commitment

    # C_sim jest przechowywany obok rekordu modelu celu

    def attach_csim(self, model_id: str, csim: SimilarityClassifier) -> str:
        self.get(model_id)
        path = csim.save(self._csim_path(model_id))
        with self._lock:
            self._append({"event": "csim", "model_id": model_id, "at": utc_now()})
        return path

    def load_csim(self, model_id: str) -> SimilarityClassifier:
        path = self._csim_path(model_id)
        if not os.path.exists(path):
            raise RegistryError(f"no similarity classifier attached to {model_id}")
        return SimilarityClassifier.load(path)

    # Spory

    def next_dispute_id(self) -> str:
        with self._lock:
            self._dispute_counter += 1
            return f"d{self._dispute_counter:06d}"

    def save_dispute(self, dispute: Dispute) -> Dispute:
        """Dopisz migawkę sporu; stanów końcowych nie można nadpisać innym stanem"""
        if dispute.status is DisputeStatus.SUBMITTED:
            raise RegistryError("a submitted dispute must pass the opening gates before it is stored")
        with self._lock:
            previous = self._disputes.get(dispute.dispute_id)
            if previous is not None and previous.status != dispute.status:
                if dispute.status not in ALLOWED_TRANSITIONS.get(previous.status, set()):
                    raise RegistryError(
                        f"dispute {dispute.dispute_id} cannot move {previous.status.value} -> {dispute.status.value}"
                    )
            self._append({"event": "dispute", "dispute": dispute.to_dict()})
            self._disputes = {**self._disputes, dispute.dispute_id: dispute}
        return dispute

    def get_dispute(self, dispute_id: str) -> Dispute:
        try:
            return self._disputes[dispute_id]
        except KeyError:
            raise RegistryError(f"unknown dispute id: {dispute_id}")

    def disputes(self) -> List[Dispute]:
        return [self._disputes[key] for key in sorted(self._disputes)]
