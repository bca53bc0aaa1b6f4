"""Load, validate and serialize scenario documents (JSON)."""
from __future__ import annotations

import io
import itertools
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
from rest_framework.exceptions import ParseError
from rest_framework.parsers import JSONParser

from quantum.conf import resolve_eps
from quantum.exceptions import QuantumError, ScenarioValidationError
from quantum.frames import MeasurementEvent, Ordering
from quantum.hilbert import Ket, Operator, SubsystemLayout, commutator_norm, lift_to_subsystem
from quantum.measurement import Branch, Observable, spin_observable, validate_observable

from .builtin import BUILTINS
from .scenario import AnalysisRequest, Scenario
from .serializers import SPIN_KEYWORDS, ComplexField, ScenarioSerializer, flatten_errors
from .specs import resolve_observable

logger = logging.getLogger(__name__)

Document = Union[str, bytes, Mapping[str, Any]]


@dataclass(frozen=True)
class ScenarioReport:
    errors: Tuple[str, ...] = ()
    warnings: Tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.errors


def parse_document(document: Document) -> Mapping[str, Any]:
    if isinstance(document, Mapping):
        return document
    if isinstance(document, str):
        document = document.encode('utf-8')
    try:
        data = JSONParser().parse(io.BytesIO(document))
    except ParseError as exc:
        raise ScenarioValidationError('scenario document does not parse', [f"$: {exc.detail}"]) from exc
    if not isinstance(data, Mapping):
        raise ScenarioValidationError('scenario document does not parse', ['$: expected a JSON object'])
    return data


def _ket(layout: SubsystemLayout, amplitudes: List[complex], normalize: bool, path: str,
         errors: List[str], eps: float) -> Optional[Ket]:
    ket = Ket(layout, np.array(amplitudes, dtype=complex))
    if normalize:
        if ket.norm() == 0.0:
            errors.append(f"{path}: the zero vector cannot be normalized")
            return None
        return ket.normalized()
    if not ket.is_normalized(eps):
        errors.append(f"{path}: not normalized (norm {ket.norm():.12g}); set \"normalize\": true to rescale")
        return None
    return ket


def _observable(layout: SubsystemLayout, event: Mapping[str, Any]) -> Observable:
    spec = event['observable']
    target = event.get('target')
    if 'keyword' in spec:
        return spin_observable(SPIN_KEYWORDS[spec['keyword']], target, layout)
    branches = []
    for branch in spec['branches']:
        matrix = np.array(branch['projector'], dtype=complex)
        operator = lift_to_subsystem(matrix, target, layout) if target is not None else Operator(layout, matrix)
        branches.append(Branch(branch['label'], branch['eigenvalue'], operator))
    if target is not None:
        targets = (target,)
    else:
        targets = tuple(spec['targets']) if 'targets' in spec else None
    return Observable(layout, tuple(branches), name=spec.get('name') or event['id'], targets=targets)


def build_scenario(data: Mapping[str, Any], eps: Optional[float] = None) -> Scenario:
    """Turn validated document data into a Scenario; kets are checked here."""
    eps = resolve_eps(eps)
    errors: List[str] = []
    try:
        layout = SubsystemLayout(tuple(data['dims']))
    except QuantumError as exc:
        raise ScenarioValidationError('invalid scenario', [f"dims: {exc}"]) from exc
    normalize = data.get('normalize', False)
    initial = _ket(layout, data['initial'], normalize, 'initial', errors, eps)
    post = _ket(layout, data['post'], normalize, 'post', errors, eps) if 'post' in data else None
    states = {}
    for key, amplitudes in data.get('states', {}).items():
        states[key] = _ket(layout, amplitudes, normalize, f"states.{key}", errors, eps)
    events = tuple(
        MeasurementEvent(event['id'], _observable(layout, event), event.get('forced_outcome'))
        for event in data['events'])
    if errors:
        raise ScenarioValidationError('invalid scenario', errors)
    labels = data.get('basis_labels')
    return Scenario(
        name=data['name'],
        layout=layout,
        initial=initial,
        events=events,
        analyses=tuple(AnalysisRequest(item['kind'], item['parameters']) for item in data.get('analyses', [])),
        basis_labels=tuple(tuple(names) for names in labels) if labels is not None else None,
        post=post,
        states=states,
    )


def _check_analysis(scenario: Scenario, index: int, request: AnalysisRequest) -> List[str]:
    path = f"analyses[{index}]"
    errors = []
    if request.kind == 'compare_orderings':
        events = scenario.event_map()
        for number, sequence in enumerate(request.parameters['orderings']):
            try:
                Ordering(tuple(sequence)).check(events)
            except QuantumError as exc:
                errors.append(f"{path}.orderings[{number}]: {exc}")
        return errors
    for key in ('observable', 'a', 'b', 'operator'):
        if key in request.parameters:
            try:
                resolve_observable(scenario, request.parameters[key])
            except QuantumError as exc:
                errors.append(f"{path}.{key}: {exc}")
    return errors


def validate_scenario(scenario: Scenario, eps: Optional[float] = None) -> ScenarioReport:
    eps = resolve_eps(eps)
    errors: List[str] = []
    warnings: List[str] = []

    for path, ket in [('initial', scenario.initial), ('post', scenario.post)] + [
            (f"states.{key}", ket) for key, ket in scenario.states.items()]:
        if ket is None:
            continue
        if ket.layout.dims != scenario.layout.dims:
            errors.append(f"{path}: layout {list(ket.layout.dims)} differs from {list(scenario.layout.dims)}")
        elif not ket.is_normalized(eps):
            errors.append(f"{path}: not normalized (norm {ket.norm():.12g})")

    seen = set()
    for index, event in enumerate(scenario.events):
        path = f"events[{index}] ({event.id})"
        if event.id in seen:
            errors.append(f"{path}: duplicate event id")
        seen.add(event.id)
        observable = event.observable
        if observable.layout.dims != scenario.layout.dims:
            errors.append(f"{path}.observable: layout {list(observable.layout.dims)} "
                          f"differs from {list(scenario.layout.dims)}")
            continue
        for target in observable.targets or ():
            if target >= scenario.layout.size:
                errors.append(f"{path}.observable: subsystem index {target} out of range")
        report = validate_observable(observable, eps)
        errors += [f"{path}.observable: {v.kind}: {v.detail} (norm {v.norm:.3g})" for v in report.violations]
        if event.forced_outcome is not None and event.forced_outcome not in observable.labels:
            errors.append(f"{path}.forced_outcome: {event.forced_outcome!r} is not one of {observable.labels}")

    if not errors:
        for first, second in itertools.combinations(scenario.events, 2):
            worst = max(commutator_norm(a.projector, b.projector)
                        for a in first.observable.branches for b in second.observable.branches)
            if worst > eps:
                warnings.append(f"events {first.id!r} and {second.id!r} do not commute; "
                                f"their order matters for every statistic")
        for index, request in enumerate(scenario.analyses):
            errors += _check_analysis(scenario, index, request)

    for message in warnings:
        logger.warning(message)
    return ScenarioReport(tuple(errors), tuple(warnings))


def load_scenario(document: Document, eps: Optional[float] = None) -> Scenario:
    data = parse_document(document)
    serializer = ScenarioSerializer(data=data)
    if not serializer.is_valid():
        raise ScenarioValidationError('invalid scenario document', flatten_errors(serializer.errors))
    scenario = build_scenario(serializer.validated_data, eps)
    report = validate_scenario(scenario, eps)
    if not report.valid:
        raise ScenarioValidationError(f"scenario {scenario.name!r} failed validation", report.errors)
    logger.info(f"Loaded scenario {scenario.name!r} with {len(scenario.events)} event(s)")
    return scenario


def load_scenario_file(path: Union[str, Path], eps: Optional[float] = None) -> Scenario:
    return load_scenario(Path(path).read_bytes(), eps)


def get_scenario(name_or_path: str, eps: Optional[float] = None) -> Scenario:
    """A built-in by name, else a scenario file; KeyError when neither exists."""
    if name_or_path in BUILTINS:
        return BUILTINS[name_or_path]()
    path = Path(name_or_path)
    if path.is_file():
        return load_scenario_file(path, eps)
    raise KeyError(name_or_path)


# Serialization

_complex = ComplexField()


def _pairs(values: np.ndarray) -> List[List[float]]:
    return [_complex.to_representation(value) for value in values]


def _observable_document(observable: Observable) -> Dict[str, Any]:
    document: Dict[str, Any] = {'name': observable.name}
    if observable.targets is not None:
        document['targets'] = list(observable.targets)
    document['branches'] = [
        {'label': branch.label, 'eigenvalue': branch.eigenvalue,
         'projector': [_pairs(row) for row in branch.projector.entries]}
        for branch in observable.branches]
    return document


def serialize_scenario(scenario: Scenario) -> Dict[str, Any]:
    """Canonical document: explicit full-space projectors, amplitudes as [re, im]."""
    document: Dict[str, Any] = {'name': scenario.name, 'dims': list(scenario.layout.dims)}
    if scenario.basis_labels is not None:
        document['basis_labels'] = [list(names) for names in scenario.basis_labels]
    document['initial'] = _pairs(scenario.initial.amplitudes)
    if scenario.post is not None:
        document['post'] = _pairs(scenario.post.amplitudes)
    if scenario.states:
        document['states'] = {key: _pairs(ket.amplitudes) for key, ket in scenario.states.items()}
    document['events'] = []
    for event in scenario.events:
        item = {'id': event.id, 'observable': _observable_document(event.observable)}
        if event.forced_outcome is not None:
            item['forced_outcome'] = event.forced_outcome
        document['events'].append(item)
    document['analyses'] = [dict({'kind': request.kind}, **request.parameters) for request in scenario.analyses]
    return document


def _close(a: Optional[Ket], b: Optional[Ket], eps: float) -> bool:
    if a is None or b is None:
        return a is b
    return a.layout.dims == b.layout.dims and bool(np.max(np.abs(a.amplitudes - b.amplitudes)) <= eps)


def _same_observable(a: Observable, b: Observable, eps: float) -> bool:
    if a.labels != b.labels:
        return False
    return all(
        abs(first.eigenvalue - second.eigenvalue) <= eps
        and np.max(np.abs(first.projector.entries - second.projector.entries)) <= eps
        for first, second in zip(a.branches, b.branches))


def scenarios_equivalent(a: Scenario, b: Scenario, eps: Optional[float] = None) -> bool:
    eps = resolve_eps(eps)
    if (a.name, a.layout.dims, a.basis_labels) != (b.name, b.layout.dims, b.basis_labels):
        return False
    if not (_close(a.initial, b.initial, eps) and _close(a.post, b.post, eps)):
        return False
    if set(a.states) != set(b.states) or not all(_close(a.states[k], b.states[k], eps) for k in a.states):
        return False
    if [(e.id, e.forced_outcome) for e in a.events] != [(e.id, e.forced_outcome) for e in b.events]:
        return False
    if not all(_same_observable(x.observable, y.observable, eps) for x, y in zip(a.events, b.events)):
        return False
    return [(r.kind, dict(r.parameters)) for r in a.analyses] == [(r.kind, dict(r.parameters)) for r in b.analyses]
