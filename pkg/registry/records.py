"""
Rekordy rejestru: zarejestrowane modele, spory i raporty poprawności budowy
"""
from dataclasses import dataclass, field, replace, asdict
from datetime import datetime, timezone
from enum import Enum
from typing import Dict, Any, List, Optional, Tuple

from core.exceptions import RegistryError
from fingerprint.verify import VerdictReport


class DisputeStatus(str, Enum):
    SUBMITTED = "submitted"  # przed bramkami otwarcia, nigdy nie zapisywany
    OPENED = "opened"
    REJECTED_COMMITMENT = "rejected-commitment"
    REJECTED_TIMESTAMP = "rejected-timestamp"
    REJECTED_MALFORMED = "rejected-malformed"
    REJECTED_FIDELITY = "rejected-fidelity"
    VERIFIED_SURROGATE = "verified-surrogate"
    VERIFIED_INDEPENDENT = "verified-independent"

    @property
    def terminal(self) -> bool:
        return self not in (DisputeStatus.SUBMITTED, DisputeStatus.OPENED)

    @property
    def verified(self) -> bool:
        return self in (DisputeStatus.VERIFIED_SURROGATE, DisputeStatus.VERIFIED_INDEPENDENT)


ALLOWED_TRANSITIONS = {
    DisputeStatus.SUBMITTED: {
        DisputeStatus.OPENED,
        DisputeStatus.REJECTED_COMMITMENT,
        DisputeStatus.REJECTED_TIMESTAMP,
    },
    DisputeStatus.OPENED: {
        DisputeStatus.REJECTED_MALFORMED,
        DisputeStatus.REJECTED_FIDELITY,
        DisputeStatus.VERIFIED_SURROGATE,
        DisputeStatus.VERIFIED_INDEPENDENT,
    },
}


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class RegistryRecord:
    """Commitment (SHA-256 bajtów modelu) + znacznik czasu rejestracji"""
    model_id: str
    commitment: str
    sequence: int
    registered_at: str
    owner_id: str

    @property
    def commitment_bytes(self) -> bytes:
        return bytes.fromhex(self.commitment)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "RegistryRecord":
        return cls(**{key: payload[key] for key in ("model_id", "commitment", "sequence", "registered_at", "owner_id")})


@dataclass(frozen=True)
class WellFormednessReport:
    findings: Tuple[Tuple[int, str], ...] = ()

    @property
    def passed(self) -> bool:
        return not self.findings

    def describe(self) -> str:
        return "; ".join(f"layer {index}: {issue}" for index, issue in self.findings) or "ok"


@dataclass(frozen=True)
class Dispute:
    """Spór oskarżyciela (właściciel F_t) z odpowiadającym (właściciel F_?)"""
    dispute_id: str
    accuser_record: RegistryRecord
    responder_record: RegistryRecord
    status: DisputeStatus = DisputeStatus.SUBMITTED
    verdict: Optional[VerdictReport] = None
    reason: str = ""
    verification_digest: Optional[str] = None
    history: Tuple[Dict[str, str], ...] = field(default_factory=tuple)

    def transition(self, status: DisputeStatus, reason: str = "",
                   verdict: Optional[VerdictReport] = None) -> "Dispute":
        """Nowy stan sporu; niedozwolone przejścia (w tym ze stanów końcowych) są błędem"""
        if status not in ALLOWED_TRANSITIONS.get(self.status, set()):
            raise RegistryError(f"illegal dispute transition {self.status.value} -> {status.value}")
        if status.verified != (verdict is not None):
            raise RegistryError("a verdict is attached exactly when the dispute is verified")
        entry = {"status": status.value, "reason": reason, "at": utc_now()}
        return replace(self, status=status, reason=reason, verdict=verdict, history=self.history + (entry,))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dispute_id": self.dispute_id,
            "accuser_record": self.accuser_record.to_dict(),
            "responder_record": self.responder_record.to_dict(),
            "status": self.status.value,
            "verdict": self.verdict.to_dict() if self.verdict else None,
            "reason": self.reason,
            "verification_digest": self.verification_digest,
            "history": list(self.history),
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "Dispute":
        return cls(
            dispute_id=payload["dispute_id"],
            accuser_record=RegistryRecord.from_dict(payload["accuser_record"]),
            responder_record=RegistryRecord.from_dict(payload["responder_record"]),
            status=DisputeStatus(payload["status"]),
            verdict=VerdictReport.from_dict(payload["verdict"]) if payload.get("verdict") else None,
            reason=payload.get("reason", ""),
            verification_digest=payload.get("verification_digest"),
            history=tuple(payload.get("history", [])),
        )


def history_statuses(dispute: Dispute) -> List[DisputeStatus]:
    return [DisputeStatus(entry["status"]) for entry in dispute.history]
