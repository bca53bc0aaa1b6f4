"""
Lorentz frames as orderings of spacelike-separated measurement events.

A frame contributes nothing but the order in which it sees the events, so
an ordering is a permutation of event ids. Running every ordering of the
same events and comparing the collapse trajectories exposes what depends on
the frame (intermediate states) and what does not (joint probabilities and
final states, whenever the events commute).
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .conf import resolve_eps
from .exceptions import ImpossibleOutcomeError, InvalidOrderingError
from .hilbert import Ket, commutator_norm, fidelity
from .measurement import Observable, measure_sequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MeasurementEvent:
    id: str
    observable: Observable
    forced_outcome: Optional[str] = None


@dataclass(frozen=True)
class Ordering:
    sequence: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, 'sequence', tuple(self.sequence))

    @classmethod
    def parse(cls, text: str) -> 'Ordering':
        return cls(tuple(part.strip() for part in text.split(',') if part.strip()))

    def __str__(self):
        return ','.join(self.sequence)

    def check(self, events: Mapping[str, MeasurementEvent]) -> None:
        if len(set(self.sequence)) != len(self.sequence) or set(self.sequence) != set(events):
            raise InvalidOrderingError(
                f"ordering [{self}] is not a permutation of the events {sorted(events)}")


EventsLike = Union[Sequence[MeasurementEvent], Mapping[str, MeasurementEvent]]


def index_events(events: EventsLike) -> Dict[str, MeasurementEvent]:
    if isinstance(events, Mapping):
        return dict(events)
    indexed: Dict[str, MeasurementEvent] = {}
    for event in events:
        if event.id in indexed:
            raise InvalidOrderingError(f"event id {event.id!r} is used twice")
        indexed[event.id] = event
    return indexed


@dataclass(frozen=True, eq=False)
class OrderingRun:
    ordering: Ordering
    outcomes: Mapping[str, str]
    # (event id, state after it); the first entry is (None, initial state).
    trajectory: Tuple[Tuple[Optional[str], Ket], ...]
    joint_probability: float
    step_probabilities: Tuple[float, ...]

    @property
    def states(self) -> List[Ket]:
        return [state for _, state in self.trajectory]

    @property
    def final(self) -> Ket:
        return self.trajectory[-1][1]


@dataclass(frozen=True)
class CutOverlap:
    depth: int
    orderings: Tuple[int, int]
    completed: Tuple[Tuple[str, ...], Tuple[str, ...]]
    same_events: bool
    overlap: float


@dataclass(frozen=True, eq=False)
class BranchComparison:
    outcomes: Mapping[str, str]
    joint_probabilities: Tuple[float, ...]
    # Fidelity of each ordering's final state with ordering 0; None if a branch never happens.
    final_overlaps: Tuple[Optional[float], ...]
    intermediate_overlaps: Tuple[CutOverlap, ...]
    runs: Tuple[Optional[OrderingRun], ...]

    @property
    def final_overlap(self) -> Optional[float]:
        defined = [value for value in self.final_overlaps if value is not None]
        return min(defined) if defined else None


@dataclass(frozen=True, eq=False)
class OrderingComparison:
    orderings: Tuple[Ordering, ...]
    branches: Tuple[BranchComparison, ...]
    ordering_invariant: bool
    commuting: bool
    warnings: Tuple[str, ...] = ()

    @property
    def joint_probabilities(self) -> Tuple[float, ...]:
        """Per ordering, summed over enumerated branches (the single forced branch otherwise)."""
        return tuple(sum(branch.joint_probabilities[i] for branch in self.branches)
                     for i in range(len(self.orderings)))

    @property
    def final_overlap(self) -> Optional[float]:
        defined = [branch.final_overlap for branch in self.branches if branch.final_overlap is not None]
        return min(defined) if defined else None

    @property
    def intermediate_overlaps(self) -> Tuple[CutOverlap, ...]:
        return tuple(cut for branch in self.branches for cut in branch.intermediate_overlaps)


def run_ordering(initial: Ket, events: EventsLike, ordering: Ordering,
                 outcomes: Optional[Mapping[str, str]] = None, eps: Optional[float] = None) -> OrderingRun:
    """Measure the events in the given order with their forced (or supplied) outcomes."""
    indexed = index_events(events)
    ordering.check(indexed)
    chosen = {}
    for event_id in ordering.sequence:
        outcome = (outcomes or {}).get(event_id, indexed[event_id].forced_outcome)
        if outcome is None:
            raise InvalidOrderingError(f"event {event_id!r} has no forced outcome and none was supplied")
        chosen[event_id] = outcome
    steps = [(indexed[event_id].observable, chosen[event_id]) for event_id in ordering.sequence]
    try:
        result = measure_sequence(initial, steps, eps)
    except ImpossibleOutcomeError as exc:
        event_id = ordering.sequence[exc.step]
        raise ImpossibleOutcomeError(
            f"event {event_id!r} cannot yield {chosen[event_id]!r} in ordering [{ordering}]",
            step=exc.step, event_id=event_id, ordering=ordering.sequence) from exc
    tagged = ((None, result.trajectory[0]),) + tuple(zip(ordering.sequence, result.trajectory[1:]))
    return OrderingRun(ordering, chosen, tagged, result.joint_probability, result.step_probabilities)


def commutation_warnings(events: Mapping[str, MeasurementEvent], eps: float) -> Tuple[bool, List[str]]:
    """Verify pairwise commutation and flag events that share a subsystem."""
    commuting = True
    warnings = []
    for first, second in itertools.combinations(events.values(), 2):
        shared = None
        if first.observable.targets is None or second.observable.targets is None:
            warnings.append(f"events {first.id!r} and {second.id!r}: subsystem support unknown")
        else:
            shared = sorted(set(first.observable.targets) & set(second.observable.targets))
            if shared:
                warnings.append(f"events {first.id!r} and {second.id!r} share subsystem(s) {shared}")
        worst = max(commutator_norm(a.projector, b.projector)
                    for a in first.observable.branches for b in second.observable.branches)
        if worst > eps:
            commuting = False
            warnings.append(f"events {first.id!r} and {second.id!r} do not commute (|[P,Q]| = {worst:.3g})")
    for message in warnings:
        logger.warning(message)
    return commuting, warnings


def _cut_overlaps(runs: Sequence[OrderingRun]) -> List[CutOverlap]:
    # Cuts are matched by depth: both observers have seen the same number of events.
    cuts = []
    for i, j in itertools.combinations(range(len(runs)), 2):
        first, second = runs[i], runs[j]
        for depth in range(1, len(first.ordering.sequence)):
            done_first = first.ordering.sequence[:depth]
            done_second = second.ordering.sequence[:depth]
            cuts.append(CutOverlap(
                depth=depth,
                orderings=(i, j),
                completed=(done_first, done_second),
                same_events=sorted(done_first) == sorted(done_second),
                overlap=fidelity(first.states[depth], second.states[depth]),
            ))
    return cuts


def _run_branch(initial, indexed, orderings, outcomes, enumerated, eps, workers):
    def attempt(ordering):
        try:
            return run_ordering(initial, indexed, ordering, outcomes, eps)
        except ImpossibleOutcomeError:
            if enumerated:
                return None
            raise

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(attempt, orderings))
    else:
        runs = [attempt(ordering) for ordering in orderings]

    probabilities = tuple(run.joint_probability if run is not None else 0.0 for run in runs)
    reference = runs[0]
    finals = tuple(
        fidelity(reference.final, run.final) if reference is not None and run is not None else None
        for run in runs)
    complete = [run for run in runs if run is not None]
    cuts = _cut_overlaps(runs) if len(complete) == len(runs) else []
    return BranchComparison(dict(outcomes), probabilities, finals, tuple(cuts), tuple(runs))


def compare_orderings(initial: Ket, events: EventsLike, orderings: Sequence[Ordering],
                      eps: Optional[float] = None, workers: Optional[int] = None) -> OrderingComparison:
    """
    Run the events under every ordering and compare the trajectories.

    Events without a forced outcome are enumerated over all their outcomes;
    each outcome assignment becomes one branch of the comparison. Results are
    aggregated by ordering index whatever the worker count.
    """
    eps = resolve_eps(eps)
    if len(orderings) < 2:
        raise InvalidOrderingError('comparing orderings needs at least two of them')
    indexed = index_events(events)
    for ordering in orderings:
        ordering.check(indexed)
    commuting, warnings = commutation_warnings(indexed, eps)

    free = [event for event in indexed.values() if event.forced_outcome is None]
    branches = []
    for labels in itertools.product(*(event.observable.labels for event in free)):
        outcomes = {event.id: label for event, label in zip(free, labels)}
        branches.append(_run_branch(initial, indexed, orderings, outcomes, bool(free), eps, workers))

    invariant = True
    for branch in branches:
        probabilities = branch.joint_probabilities
        if max(probabilities) - min(probabilities) > eps:
            invariant = False
        if any(value is not None and value < 1.0 - eps for value in branch.final_overlaps):
            invariant = False

    logger.info(f"Compared {len(orderings)} orderings over {len(branches)} branch(es); invariant={invariant}")
    return OrderingComparison(tuple(orderings), tuple(branches), invariant, commuting, tuple(warnings))
