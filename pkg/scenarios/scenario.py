"""Scenario: a prepared state, spacelike measurement events and the analyses to run on them."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple

from quantum.exceptions import ScenarioValidationError
from quantum.frames import MeasurementEvent, Ordering, index_events, run_ordering
from quantum.hilbert import Ket, SubsystemLayout
from quantum.tsvf import TwoStateVector

ANALYSIS_KINDS = ('compare_orderings', 'abl', 'eor', 'check_rules', 'weak_value', 'weak_mc')


@dataclass(frozen=True)
class AnalysisRequest:
    kind: str
    parameters: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ANALYSIS_KINDS:
            raise ScenarioValidationError(f"unknown analysis kind {self.kind!r}", [f"kind: one of {ANALYSIS_KINDS}"])


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    layout: SubsystemLayout
    initial: Ket
    events: Tuple[MeasurementEvent, ...]
    analyses: Tuple[AnalysisRequest, ...] = ()
    basis_labels: Optional[Tuple[Tuple[str, ...], ...]] = None
    # Explicit post-selected state; derived from the forced events when absent.
    post: Optional[Ket] = None
    # Named reference states (e.g. the combined-inference state).
    states: Mapping[str, Ket] = field(default_factory=dict)

    def event_map(self) -> Dict[str, MeasurementEvent]:
        return index_events(self.events)

    def event_ids(self) -> List[str]:
        return [event.id for event in self.events]

    def listed_ordering(self) -> Ordering:
        return Ordering(tuple(self.event_ids()))

    def post_selected_state(self) -> Ket:
        if self.post is not None:
            return self.post
        unforced = [event.id for event in self.events if event.forced_outcome is None]
        if unforced:
            raise ScenarioValidationError(
                f"scenario {self.name!r} has no post-selected state",
                [f"events: {unforced} lack forced outcomes and no 'post' state is given"])
        return run_ordering(self.initial, self.events, self.listed_ordering()).final

    def two_state_vector(self) -> TwoStateVector:
        return TwoStateVector(pre=self.initial, post=self.post_selected_state())

    def requests(self, kind: str) -> List[AnalysisRequest]:
        return [request for request in self.analyses if request.kind == kind]
