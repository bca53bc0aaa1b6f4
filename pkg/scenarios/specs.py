"""
Observable specs used on the command line and in analysis requests.

    z1, x2, y1   Pauli observable on qubit 1, 2, ... (1-indexed particle number)
    z1z2         product observable sigma_z1 sigma_z2 (branches grouped by eigenvalue)
    z1&z2        fine-grained joint observable, branch labels 'a,b'
    A, x1, ...   an event id of the scenario names that event's observable
"""
from __future__ import annotations

import re
from functools import reduce
from typing import List, Tuple

from quantum.exceptions import QuantumError
from quantum.measurement import Observable, joint_observable, product_observable, spin_observable

from .scenario import Scenario

_FACTOR = re.compile(r'([xyz])([1-9][0-9]*)')
_PRODUCT = re.compile(r'^(?:[xyz][1-9][0-9]*)+$')


class ObservableSpecError(QuantumError):
    """An observable spec does not parse or names an unknown subsystem."""


def _factors(spec: str) -> List[Tuple[str, int]]:
    return [(axis, int(number) - 1) for axis, number in _FACTOR.findall(spec)]


def _pauli_product(scenario: Scenario, spec: str) -> Observable:
    observables = []
    for axis, target in _factors(spec):
        if target >= scenario.layout.size:
            raise ObservableSpecError(
                f"{spec!r} refers to particle {target + 1}; scenario {scenario.name!r} has {scenario.layout.size}")
        observables.append(spin_observable(axis, target, scenario.layout))
    return reduce(product_observable, observables)


def resolve_observable(scenario: Scenario, spec: str) -> Observable:
    spec = spec.strip()
    events = scenario.event_map()
    if spec in events:
        return events[spec].observable
    if '&' in spec:
        parts = [part.strip() for part in spec.split('&')]
        return reduce(joint_observable, (resolve_observable(scenario, part) for part in parts))
    if _PRODUCT.match(spec):
        return _pauli_product(scenario, spec)
    raise ObservableSpecError(
        f"cannot understand observable {spec!r}; use e.g. z1, x2, z1z2, z1&z2 or an event id "
        f"{sorted(events)}")
