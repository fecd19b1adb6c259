"""
Builder grafu przepływu sporu między bramkami
"""
import logging
from typing import Callable, List, Optional

from langgraph.graph import StateGraph, END

from registry.gates import (
    CommitmentGate,
    TimestampGate,
    WellFormednessGate,
    FidelityGate,
    VerificationGate
)
from registry.records import DisputeStatus
from registry.state import DisputeState
from registry.store import ModelRegistry

logger = logging.getLogger(__name__)

NodeHook = Callable[[str, DisputeState], None]

OPEN_SEQUENCE = ["commitment", "timestamp"]
RESOLVE_SEQUENCE = ["well_formed", "fidelity", "verify"]


class DisputeGraphBuilder:
    """Builder grafu bramek sporu (otwarcie i rozstrzygnięcie)"""

    def __init__(self, registry: ModelRegistry, on_node: Optional[List[NodeHook]] = None):
        self.registry = registry
        self.on_node = list(on_node or [])

        # Inicjalizuj bramki
        self.gates = {
            gate.name: gate
            for gate in (
                CommitmentGate(registry),
                TimestampGate(registry),
                WellFormednessGate(registry),
                FidelityGate(registry),
                VerificationGate(registry),
            )
        }

    def _route_entry(self, state: DisputeState) -> str:
        """Pierwsza bramka zależy od etapu i statusu sporu"""
        status = state["dispute"].status
        if status.terminal:
            return END
        if state.get("stage") == "open" and status is DisputeStatus.SUBMITTED:
            return OPEN_SEQUENCE[0]
        if state.get("stage") == "resolve" and status is DisputeStatus.OPENED:
            return RESOLVE_SEQUENCE[0]
        return END

    def _route_after(self, name: str) -> Callable[[DisputeState], str]:
        sequence = OPEN_SEQUENCE if name in OPEN_SEQUENCE else RESOLVE_SEQUENCE

        def route(state: DisputeState) -> str:
            if state["dispute"].status.terminal:
                logger.debug(f"Spór {state['dispute'].dispute_id}: {state['dispute'].status.value} po {name}")
                return END
            position = sequence.index(name)
            return sequence[position + 1] if position + 1 < len(sequence) else END

        return route

    def build(self):
        """Zbuduj graf przepływu"""
        workflow = StateGraph(DisputeState)

        # Wrapper wołający hooki instrumentacji przed bramką
        def wrap_gate(name: str, process):
            def wrapped(state):
                for hook in self.on_node:
                    hook(name, state)
                return process(state)
            return wrapped

        for name, gate in self.gates.items():
            workflow.add_node(name, wrap_gate(name, gate.process))

        workflow.set_conditional_entry_point(
            self._route_entry,
            {OPEN_SEQUENCE[0]: OPEN_SEQUENCE[0], RESOLVE_SEQUENCE[0]: RESOLVE_SEQUENCE[0], END: END}
        )

        for sequence in (OPEN_SEQUENCE, RESOLVE_SEQUENCE):
            for position, name in enumerate(sequence):
                targets = {END: END}
                if position + 1 < len(sequence):
                    targets[sequence[position + 1]] = sequence[position + 1]
                workflow.add_conditional_edges(name, self._route_after(name), targets)

        return workflow.compile()
