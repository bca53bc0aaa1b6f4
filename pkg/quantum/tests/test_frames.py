import itertools
import math

import numpy as np
from django.test import SimpleTestCase

from quantum.exceptions import ImpossibleOutcomeError, InvalidOrderingError
from quantum.frames import MeasurementEvent, Ordering, compare_orderings, run_ordering
from quantum.hilbert import SubsystemLayout, basis_ket, fidelity, ket_from_amplitudes, lift_to_subsystem, same_ray
from quantum.measurement import Branch, Observable, box_observable, spin_observable

from .factories import random_ket, random_observable

CASES = 1000


def three_boxes():
    layout = SubsystemLayout((3,))
    initial = ket_from_amplitudes(layout, [1, 1, 1], normalize=True)
    events = [
        MeasurementEvent('A', box_observable(0, layout), 'not-found'),
        MeasurementEvent('C', box_observable(2, layout), 'found'),
    ]
    return layout, initial, events


def hardy():
    layout = SubsystemLayout.qubits(2)
    initial = ket_from_amplitudes(layout, [1, 1, 1, 0], normalize=True)
    events = [
        MeasurementEvent('x1', spin_observable('x', 0, layout), '-1'),
        MeasurementEvent('x2', spin_observable('x', 1, layout), '-1'),
    ]
    return layout, initial, events


def local_observable(rng, layout, target):
    local = random_observable(rng, SubsystemLayout((layout.dims[target],)))
    branches = tuple(Branch(b.label, b.eigenvalue, lift_to_subsystem(b.projector, target, layout))
                     for b in local.branches)
    return Observable(layout, branches, name=f"R{target}", targets=(target,))


class OrderingTests(SimpleTestCase):
    def test_parse(self):
        ordering = Ordering.parse(' A, C ')
        self.assertEqual(ordering.sequence, ('A', 'C'))
        self.assertEqual(str(ordering), 'A,C')

    def test_ordering_must_be_a_permutation(self):
        _, initial, events = three_boxes()
        for sequence in (('A',), ('A', 'A'), ('A', 'B')):
            with self.assertRaises(InvalidOrderingError):
                run_ordering(initial, events, Ordering(sequence))

    def test_unforced_event_needs_an_outcome(self):
        layout = SubsystemLayout((3,))
        initial = ket_from_amplitudes(layout, [1, 1, 1], normalize=True)
        events = [MeasurementEvent('A', box_observable(0, layout))]
        with self.assertRaises(InvalidOrderingError):
            run_ordering(initial, events, Ordering(('A',)))
        run = run_ordering(initial, events, Ordering(('A',)), outcomes={'A': 'found'})
        self.assertAlmostEqual(run.joint_probability, 1 / 3)

    def test_impossible_forced_outcome_names_the_event(self):
        layout = SubsystemLayout((3,))
        initial = basis_ket(layout, [1])
        events = [MeasurementEvent('B', box_observable(1, layout), 'not-found')]
        with self.assertRaises(ImpossibleOutcomeError) as caught:
            run_ordering(initial, events, Ordering(('B',)))
        self.assertEqual(caught.exception.event_id, 'B')
        self.assertEqual(caught.exception.ordering, ['B'])


class ThreeBoxTrajectoryTests(SimpleTestCase):
    def setUp(self):
        self.layout, self.initial, self.events = three_boxes()
        self.orderings = [Ordering(('A', 'C')), Ordering(('C', 'A'))]

    def test_intermediate_states_depend_on_the_ordering(self):
        first = run_ordering(self.initial, self.events, self.orderings[0])
        second = run_ordering(self.initial, self.events, self.orderings[1])
        b_or_c = ket_from_amplitudes(self.layout, [0, 1, 1], normalize=True)
        self.assertTrue(same_ray(first.states[1], b_or_c, 1e-12))
        self.assertTrue(same_ray(second.states[1], basis_ket(self.layout, [2]), 1e-12))
        self.assertAlmostEqual(fidelity(first.states[1], second.states[1]), 0.5, delta=1e-12)
        self.assertEqual(first.trajectory[0][0], None)
        self.assertEqual([event_id for event_id, _ in first.trajectory[1:]], ['A', 'C'])

    def test_comparison_is_invariant(self):
        comparison = compare_orderings(self.initial, self.events, self.orderings)
        self.assertTrue(comparison.ordering_invariant)
        self.assertTrue(comparison.commuting)
        np.testing.assert_allclose(comparison.joint_probabilities, [1 / 3, 1 / 3], atol=1e-12)
        self.assertGreaterEqual(comparison.final_overlap, 1 - 1e-12)
        (cut,) = comparison.intermediate_overlaps
        self.assertEqual(cut.depth, 1)
        self.assertFalse(cut.same_events)
        self.assertAlmostEqual(cut.overlap, 0.5, delta=1e-12)

    def test_workers_do_not_change_the_result(self):
        serial = compare_orderings(self.initial, self.events, self.orderings)
        threaded = compare_orderings(self.initial, self.events, self.orderings, workers=2)
        self.assertEqual(serial.joint_probabilities, threaded.joint_probabilities)
        self.assertEqual(serial.final_overlap, threaded.final_overlap)

    def test_repeated_ordering_agrees_with_itself(self):
        comparison = compare_orderings(self.initial, self.events, [self.orderings[0], self.orderings[0]])
        self.assertTrue(comparison.ordering_invariant)
        (branch,) = comparison.branches
        for overlap in branch.final_overlaps:
            self.assertAlmostEqual(overlap, 1.0, delta=1e-12)
        for cut in branch.intermediate_overlaps:
            self.assertTrue(cut.same_events)
            self.assertAlmostEqual(cut.overlap, 1.0, delta=1e-12)

    def test_needs_two_orderings(self):
        with self.assertRaises(InvalidOrderingError):
            compare_orderings(self.initial, self.events, self.orderings[:1])


class HardyTrajectoryTests(SimpleTestCase):
    def setUp(self):
        self.layout, self.initial, self.events = hardy()

    def test_intermediate_states(self):
        one_first = run_ordering(self.initial, self.events, Ordering(('x1', 'x2')))
        two_first = run_ordering(self.initial, self.events, Ordering(('x2', 'x1')))
        r = 1 / math.sqrt(2)
        self.assertTrue(same_ray(one_first.states[1], ket_from_amplitudes(self.layout, [0, r, 0, -r]), 1e-12))
        self.assertTrue(same_ray(two_first.states[1], ket_from_amplitudes(self.layout, [0, 0, r, -r]), 1e-12))
        self.assertAlmostEqual(fidelity(one_first.states[1], two_first.states[1]), 0.25, delta=1e-12)
        self.assertAlmostEqual(one_first.joint_probability, 1 / 12, delta=1e-12)
        self.assertAlmostEqual(two_first.joint_probability, 1 / 12, delta=1e-12)

    def test_comparison(self):
        comparison = compare_orderings(self.initial, self.events, [Ordering(('x1', 'x2')), Ordering(('x2', 'x1'))])
        self.assertTrue(comparison.ordering_invariant)
        np.testing.assert_allclose(comparison.joint_probabilities, [1 / 12, 1 / 12], atol=1e-12)
        self.assertAlmostEqual(comparison.intermediate_overlaps[0].overlap, 0.25, delta=1e-12)


class OrderingInvarianceTests(SimpleTestCase):
    def test_disjoint_subsystem_events_are_ordering_invariant(self):
        rng = np.random.default_rng(11)
        for _ in range(CASES):
            count = int(rng.integers(2, 4))
            layout = SubsystemLayout.qubits(count)
            initial = random_ket(rng, layout)
            events = [MeasurementEvent(f"e{k}", local_observable(rng, layout, k)) for k in range(count)]
            orderings = [Ordering(p) for p in itertools.permutations([event.id for event in events])]
            comparison = compare_orderings(initial, events, orderings)
            self.assertTrue(comparison.commuting)
            self.assertTrue(comparison.ordering_invariant)
            np.testing.assert_allclose(comparison.joint_probabilities, 1.0, atol=1e-12)

    def test_non_commuting_events_are_flagged(self):
        layout = SubsystemLayout((2,))
        events = [MeasurementEvent('z', spin_observable('z', 0, layout)),
                  MeasurementEvent('x', spin_observable('x', 0, layout))]
        with self.assertLogs('quantum.frames', level='WARNING'):
            comparison = compare_orderings(basis_ket(layout, [0]), events,
                                           [Ordering(('z', 'x')), Ordering(('x', 'z'))])
        self.assertFalse(comparison.commuting)
        self.assertFalse(comparison.ordering_invariant)
        self.assertTrue(any('share subsystem' in message for message in comparison.warnings))
        branch = next(b for b in comparison.branches if b.outcomes == {'z': '+1', 'x': '+1'})
        np.testing.assert_allclose(branch.joint_probabilities, [0.5, 0.25], atol=1e-12)
