"""
Pakiet rejestru: commitmenty, znaczniki czasu, spory i usługa HTTP
"""
from .records import DisputeStatus, RegistryRecord, Dispute, WellFormednessReport
from .store import ModelRegistry, SequenceTimestamper, Timestamper, commitment_of
from .checks import check_well_formed, fidelity_check, probe_nodes
from .state import DisputeState
from .gates import CommitmentGate, TimestampGate, WellFormednessGate, FidelityGate, VerificationGate
from .disputes import open_dispute, resolve
from .server import RegistryServer

__all__ = [
    'DisputeStatus',
    'RegistryRecord',
    'Dispute',
    'WellFormednessReport',
    'ModelRegistry',
    'SequenceTimestamper',
    'Timestamper',
    'commitment_of',
    'check_well_formed',
    'fidelity_check',
    'probe_nodes',
    'DisputeState',
    'CommitmentGate',
    'TimestampGate',
    'WellFormednessGate',
    'FidelityGate',
    'VerificationGate',
    'open_dispute',
    'resolve',
    'RegistryServer'
]
