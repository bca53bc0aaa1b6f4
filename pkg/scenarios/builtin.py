"""The two built-in gedanken experiments: three boxes and the two-spin Hardy analog."""
from __future__ import annotations

import math
from typing import Callable, Dict

from quantum.conf import weak_defaults
from quantum.frames import MeasurementEvent
from quantum.hilbert import SubsystemLayout, basis_ket, ket_from_amplitudes
from quantum.measurement import box_observable, spin_observable

from .scenario import AnalysisRequest, Scenario

THREE_BOX = 'three-box'
HARDY = 'hardy'


def builtin_three_box() -> Scenario:
    """A particle spread over boxes A, B, C; boxes A and C are opened and it is found in C."""
    layout = SubsystemLayout((3,))
    initial = ket_from_amplitudes(layout, [1, 1, 1], normalize=True)
    events = (
        MeasurementEvent('A', box_observable(0, layout, name='open_A'), 'not-found'),
        MeasurementEvent('C', box_observable(2, layout, name='open_C'), 'found'),
    )
    analyses = (
        AnalysisRequest('compare_orderings', {'orderings': [['A', 'C'], ['C', 'A']]}),
    )
    return Scenario(
        name=THREE_BOX,
        layout=layout,
        initial=initial,
        events=events,
        analyses=analyses,
        basis_labels=(('A', 'B', 'C'),),
    )


def builtin_hardy_spins() -> Scenario:
    """Two spins prepared in (|uu> + |ud> + |du>)/sqrt3, both found spin-down along x."""
    layout = SubsystemLayout.qubits(2)
    initial = ket_from_amplitudes(layout, [1, 1, 1, 0], normalize=True)
    post = ket_from_amplitudes(layout, [0.5, -0.5, -0.5, 0.5])
    events = (
        MeasurementEvent('x1', spin_observable('x', 0, layout), '-1'),
        MeasurementEvent('x2', spin_observable('x', 1, layout), '-1'),
    )
    weak = weak_defaults()
    analyses = (
        AnalysisRequest('compare_orderings', {'orderings': [['x1', 'x2'], ['x2', 'x1']]}),
        AnalysisRequest('abl', {'observable': 'z1'}),
        AnalysisRequest('abl', {'observable': 'z2'}),
        AnalysisRequest('abl', {'observable': 'z1&z2'}),
        AnalysisRequest('eor', {'observable': 'z1'}),
        AnalysisRequest('eor', {'observable': 'z2'}),
        AnalysisRequest('check_rules', {'a': 'z1', 'b': 'z2'}),
        AnalysisRequest('check_rules', {'a': 'x1', 'b': 'x2'}),
        AnalysisRequest('weak_value', {'operator': 'z1'}),
        AnalysisRequest('weak_value', {'operator': 'z2'}),
        AnalysisRequest('weak_value', {'operator': 'z1z2'}),
        AnalysisRequest('weak_mc', {
            'operator': 'z1z2',
            'g': weak['g'],
            'delta': weak['delta'],
            'post_samples': weak['post_samples'],
            'seed': weak['seed'],
            'grid_points': weak['grid_points'],
            'shards': weak['shards'],
        }),
    )
    states = {
        'post_selected': post,
        'combined_inference': basis_ket(layout, [1, 1]),
        'particle_1_first': ket_from_amplitudes(layout, [0, 1 / math.sqrt(2), 0, -1 / math.sqrt(2)]),
        'particle_2_first': ket_from_amplitudes(layout, [0, 0, 1 / math.sqrt(2), -1 / math.sqrt(2)]),
    }
    return Scenario(
        name=HARDY,
        layout=layout,
        initial=initial,
        events=events,
        analyses=analyses,
        basis_labels=(('up', 'down'), ('up', 'down')),
        post=post,
        states=states,
    )


BUILTINS: Dict[str, Callable[[], Scenario]] = {
    THREE_BOX: builtin_three_box,
    HARDY: builtin_hardy_spins,
}

DESCRIPTIONS = {
    THREE_BOX: 'particle in three boxes; A and C opened, found in C',
    HARDY: 'two spins in the Hardy state, both post-selected spin-down along x',
}
