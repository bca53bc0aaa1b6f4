import numpy as np
from django.test import SimpleTestCase

from quantum.exceptions import (
    DimensionError,
    ImpossibleOutcomeError,
    IncompatibleObservablesError,
    InvalidObservableError,
)
from quantum.hilbert import Operator, SubsystemLayout, basis_ket, fidelity, ket_from_amplitudes, same_ray
from quantum.measurement import (
    Branch,
    Observable,
    born_distribution,
    box_observable,
    collapse,
    enumerate_sequences,
    format_eigenvalue,
    joint_observable,
    measure_sequence,
    product_observable,
    require_valid,
    spin_observable,
    validate_observable,
)

from .factories import qubit_observable, random_ket, random_observable

CASES = 1000


class ObservableValidationTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(20240101)

    def test_random_observables_validate(self):
        for _ in range(CASES):
            layout = SubsystemLayout((int(self.rng.integers(2, 5)),))
            report = validate_observable(random_observable(self.rng, layout))
            self.assertTrue(report.valid, report.messages())

    def test_broken_observables_are_reported(self):
        for _ in range(CASES):
            layout = SubsystemLayout((int(self.rng.integers(2, 5)),))
            observable = random_observable(self.rng, layout)
            if len(observable.branches) < 2:
                continue
            missing = Observable(layout, observable.branches[1:])
            kinds = {v.kind for v in validate_observable(missing).violations}
            self.assertIn('completeness', kinds)

            doubled = Observable(layout, observable.branches + observable.branches[:1])
            kinds = {v.kind for v in validate_observable(doubled).violations}
            self.assertIn('orthogonality', kinds)
            self.assertIn('labels', kinds)

            first = observable.branches[0]
            stretched = Observable(layout, (Branch(first.label, first.eigenvalue, first.projector * 2.0),)
                                   + observable.branches[1:])
            kinds = {v.kind for v in validate_observable(stretched).violations}
            self.assertIn('projector', kinds)

    def test_require_valid_lists_violations(self):
        layout = SubsystemLayout((2,))
        half = Operator(layout, np.eye(2) * 0.5)
        with self.assertRaises(InvalidObservableError) as caught:
            require_valid(Observable(layout, (Branch('a', 1.0, half),), name='half'))
        self.assertTrue(caught.exception.violations)

    def test_spin_observable_branches(self):
        layout = SubsystemLayout.qubits(2)
        sigma = spin_observable('x', 1, layout)
        self.assertEqual(sigma.labels, ['+1', '-1'])
        self.assertEqual(sigma.name, 'sigma_x2')
        self.assertEqual(sigma.targets, (1,))
        minus = ket_from_amplitudes(layout, [0, 0, 1, -1], normalize=True)
        self.assertAlmostEqual(born_distribution(minus, sigma)['-1'], 1.0)

    def test_spin_observable_needs_a_qubit(self):
        with self.assertRaises(DimensionError):
            spin_observable('z', 0, SubsystemLayout((3,)))

    def test_format_eigenvalue(self):
        self.assertEqual(format_eigenvalue(1.0), '+1')
        self.assertEqual(format_eigenvalue(-1.0), '-1')
        self.assertEqual(format_eigenvalue(-0.0), '+0')
        self.assertEqual(format_eigenvalue(0.5), '+0.5')
        self.assertEqual(format_eigenvalue(1.1234567), '+1.1234567')
        self.assertEqual(format_eigenvalue(np.float64(-2.25)), '-2.25')
        self.assertNotEqual(format_eigenvalue(1.0000001), format_eigenvalue(1.0000002))
        # Differences below the rounding precision share a label.
        self.assertEqual(format_eigenvalue(1.0 + 1e-14), '+1')


class CollapseTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_collapse_is_normalized_and_repeatable(self):
        for _ in range(CASES):
            layout = SubsystemLayout((int(self.rng.integers(2, 4)), 2))
            state = random_ket(self.rng, layout)
            observable = random_observable(self.rng, layout)
            distribution = born_distribution(state, observable)
            self.assertAlmostEqual(distribution.total(), 1.0, delta=1e-12)
            label = max(distribution.entries, key=distribution.entries.get)
            collapsed = collapse(state, observable, label)
            self.assertTrue(collapsed.is_normalized(1e-12))
            self.assertAlmostEqual(born_distribution(collapsed, observable)[label], 1.0, delta=1e-12)
            again = collapse(collapsed, observable, label)
            self.assertTrue(same_ray(collapsed, again, 1e-12))

    def test_impossible_outcome(self):
        layout = SubsystemLayout((3,))
        with self.assertRaises(ImpossibleOutcomeError):
            collapse(basis_ket(layout, [1]), box_observable(1, layout), 'not-found')

    def test_sequence_error_names_the_step(self):
        layout = SubsystemLayout((3,))
        state = ket_from_amplitudes(layout, [1, 1, 1], normalize=True)
        steps = [(box_observable(2, layout), 'found'), (box_observable(0, layout), 'found')]
        with self.assertRaises(ImpossibleOutcomeError) as caught:
            measure_sequence(state, steps)
        self.assertEqual(caught.exception.step, 1)

    def test_sequence_probabilities_multiply(self):
        layout = SubsystemLayout((3,))
        state = ket_from_amplitudes(layout, [1, 1, 1], normalize=True)
        result = measure_sequence(state, [(box_observable(0, layout), 'not-found'),
                                          (box_observable(2, layout), 'found')])
        np.testing.assert_allclose(result.step_probabilities, [2 / 3, 1 / 2], atol=1e-12)
        self.assertAlmostEqual(result.joint_probability, 1 / 3, delta=1e-12)
        self.assertAlmostEqual(fidelity(result.final, basis_ket(layout, [2])), 1.0, delta=1e-12)
        self.assertEqual(len(result.trajectory), 3)

    def test_enumerated_chains_sum_to_one(self):
        layout = SubsystemLayout.qubits(2)
        state = random_ket(self.rng, layout)
        chains = enumerate_sequences(state, [spin_observable('x', 0, layout), spin_observable('z', 0, layout),
                                             spin_observable('y', 1, layout)])
        self.assertEqual(len(chains), 8)
        self.assertAlmostEqual(sum(chains.values()), 1.0, delta=1e-12)


class CompositeObservableTests(SimpleTestCase):
    def setUp(self):
        self.layout = SubsystemLayout.qubits(2)
        self.z1 = spin_observable('z', 0, self.layout)
        self.z2 = spin_observable('z', 1, self.layout)

    def test_joint_observable_labels(self):
        joint = joint_observable(self.z1, self.z2)
        self.assertEqual(joint.labels, ['+1,+1', '+1,-1', '-1,+1', '-1,-1'])
        self.assertEqual(joint.targets, (0, 1))
        self.assertTrue(validate_observable(joint).valid)

    def test_close_products_keep_distinct_labels(self):
        a = qubit_observable(self.layout, 0, 1.0000001, 1.0000002)
        product = product_observable(a, self.z2)
        self.assertEqual(product.labels, ['+1.0000002', '+1.0000001', '-1.0000001', '-1.0000002'])
        self.assertTrue(validate_observable(product).valid)
        self.assertEqual(product.eigenvalue_of('-1.0000002'), -1.0000002)

    def test_product_observable_groups_degenerate_branches(self):
        product = product_observable(self.z1, self.z2)
        self.assertEqual(product.labels, ['+1', '-1'])
        np.testing.assert_allclose(np.diag(product.branch('+1').projector.entries).real, [1, 0, 0, 1])
        self.assertTrue(validate_observable(product).valid)
        np.testing.assert_allclose(product.operator().entries, np.diag([1, -1, -1, 1]))

    def test_non_commuting_observables_have_no_joint_measurement(self):
        with self.assertRaises(IncompatibleObservablesError):
            joint_observable(self.z1, spin_observable('x', 0, self.layout))

    def test_box_observable(self):
        layout = SubsystemLayout((3,))
        box = box_observable(1, layout, name='open_B')
        self.assertEqual(box.labels, ['found', 'not-found'])
        self.assertEqual(box.eigenvalue_of('not-found'), 0.0)
        state = ket_from_amplitudes(layout, [1, 1, 1], normalize=True)
        self.assertAlmostEqual(born_distribution(state, box)['found'], 1 / 3)
        with self.assertRaises(InvalidObservableError):
            box.branch('maybe')

    def test_observable_operator_is_spectral_sum(self):
        sigma = spin_observable('y', 0, SubsystemLayout((2,)))
        np.testing.assert_allclose(sigma.operator().entries, [[0, -1j], [1j, 0]], atol=1e-12)
        self.assertEqual(sigma.eigenvalue_of('+1'), 1.0)
