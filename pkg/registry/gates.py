"""
Bramki sporu (węzły grafu): commitment -> znacznik czasu przy otwarciu,
poprawność budowy -> wierność -> weryfikacja przy rozstrzyganiu

Bramka nie rzuca wyjątku przy niespełnionym warunku protokołu, tylko zwraca
aktualizację stanu ze statusem odrzucenia i powodem.
"""
import logging
from typing import Dict, Any

from attacks.oracle import InProcessOracle
from fingerprint.verify import verify
from .checks import check_well_formed, fidelity_check, probe_nodes
from .records import DisputeStatus
from .state import DisputeState
from .store import ModelRegistry

logger = logging.getLogger(__name__)


class Gate:
    """Bazowa bramka: dopisuje swoją nazwę do śladu wykonania"""
    name = "gate"

    def __init__(self, registry: ModelRegistry):
        self.registry = registry

    def _update(self, state: DisputeState, **changes) -> Dict[str, Any]:
        changes["trace"] = list(state.get("trace", [])) + [self.name]
        return changes

    def process(self, state: DisputeState) -> Dict[str, Any]:
        raise NotImplementedError


class CommitmentGate(Gate):
    """Przesłane bajty obu modeli muszą odpowiadać zarejestrowanym commitmentom"""
    name = "commitment"

    def process(self, state: DisputeState) -> Dict[str, Any]:
        dispute = state["dispute"]
        for role, record, blob in (
            ("target", dispute.accuser_record, state["target_bytes"]),
            ("suspect", dispute.responder_record, state["suspect_bytes"]),
        ):
            if not self.registry.verify_commitment(record, blob):
                reason = f"commitment mismatch: submitted {role} bytes differ from registered model {record.model_id}"
                logger.warning(f"⚠️ Spór {dispute.dispute_id}: {reason}")
                return self._update(state, dispute=dispute.transition(DisputeStatus.REJECTED_COMMITMENT, reason))
        return self._update(state)


class TimestampGate(Gate):
    """Oskarżyciel musi zarejestrować model wcześniej niż odpowiadający (t_t < t_?)"""
    name = "timestamp"

    def process(self, state: DisputeState) -> Dict[str, Any]:
        dispute = state["dispute"]
        accuser, responder = dispute.accuser_record, dispute.responder_record
        if accuser.sequence >= responder.sequence:
            reason = f"accuser registered at {accuser.sequence}, not before responder at {responder.sequence}"
            return self._update(state, dispute=dispute.transition(DisputeStatus.REJECTED_TIMESTAMP, reason))
        return self._update(state, dispute=dispute.transition(DisputeStatus.OPENED, "commitments and timestamps verified"))


class WellFormednessGate(Gate):
    """Oba modele zbudowane wyłącznie z rozpoznanych warstw"""
    name = "well_formed"

    def process(self, state: DisputeState) -> Dict[str, Any]:
        dispute = state["dispute"]
        target = state.get("target_model") or self.registry.load_model(dispute.accuser_record.model_id)
        suspect = state.get("suspect_model") or self.registry.load_model(dispute.responder_record.model_id)
        for role, model in (("target", target), ("suspect", suspect)):
            report = check_well_formed(model)
            if not report.passed:
                reason = f"{role} model is not well-formed: {report.describe()}"
                return self._update(state, dispute=dispute.transition(DisputeStatus.REJECTED_MALFORMED, reason))
        return self._update(state, target_model=target, suspect_model=suspect)


class FidelityGate(Gate):
    """Wdrożone modele zwracają dokładnie embeddingi zarejestrowanych (bez post-processingu)"""
    name = "fidelity"

    def process(self, state: DisputeState) -> Dict[str, Any]:
        dispute, seed = state["dispute"], state.get("seed", 0)
        probe = probe_nodes(state["d_v"], seed=seed)
        for role in ("target", "suspect"):
            model = state[f"{role}_model"]
            oracle = state.get(f"{role}_oracle") or InProcessOracle(model, seed=seed)
            if not fidelity_check(model, oracle, state["graph"], probe, seed=seed):
                reason = f"deployed {role} model does not reproduce the registered model's embeddings"
                return self._update(state, dispute=dispute.transition(DisputeStatus.REJECTED_FIDELITY, reason))
        return self._update(state)


class VerificationGate(Gate):
    """C_sim celu decyduje, czy F_? jest surogatem"""
    name = "verify"

    def process(self, state: DisputeState) -> Dict[str, Any]:
        dispute = state["dispute"]
        report = verify(state["csim"], state["target_model"], state["suspect_model"],
                        state["graph"], state["d_v"], seed=state.get("seed", 0))
        report.target_commitment = dispute.accuser_record.commitment
        report.suspect_commitment = dispute.responder_record.commitment
        report.verification_digest = dispute.verification_digest
        status = DisputeStatus.VERIFIED_SURROGATE if report.is_surrogate else DisputeStatus.VERIFIED_INDEPENDENT
        reason = f"{report.similar_fraction:.3f} of {report.pair_count} embedding pairs classified similar"
        return self._update(state, dispute=dispute.transition(status, reason, verdict=report))
