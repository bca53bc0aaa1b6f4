import math

import numpy as np
from django.test import SimpleTestCase, override_settings

from quantum.exceptions import DimensionError, NormalizationError, SizeError
from quantum.hilbert import (
    SIGMA_X,
    SIGMA_Z,
    Ket,
    Operator,
    SubsystemLayout,
    apply,
    basis_ket,
    commutator_norm,
    expectation,
    fidelity,
    inner_product,
    ket_from_amplitudes,
    lift_to_subsystem,
    pauli,
    projector_onto,
    qubit_ket,
    same_ray,
    tensor_kets,
    tensor_operators,
)


class SubsystemLayoutTests(SimpleTestCase):
    def test_index_is_lexicographic(self):
        layout = SubsystemLayout((2, 3))
        self.assertEqual(layout.total, 6)
        self.assertEqual(layout.index_of([0, 0]), 0)
        self.assertEqual(layout.index_of([0, 2]), 2)
        self.assertEqual(layout.index_of([1, 0]), 3)
        self.assertEqual(layout.index_of([1, 2]), 5)

    def test_rejects_trivial_subsystem(self):
        with self.assertRaises(DimensionError):
            SubsystemLayout((2, 1))

    @override_settings(TSVF_MAX_DIMENSION=16)
    def test_size_cap_comes_from_settings(self):
        SubsystemLayout.qubits(4)
        with self.assertRaises(SizeError):
            SubsystemLayout.qubits(5)

    def test_out_of_range_index(self):
        with self.assertRaises(DimensionError):
            SubsystemLayout((2, 2)).index_of([0, 2])


class KetTests(SimpleTestCase):
    def test_unnormalized_input_is_rejected_unless_asked(self):
        layout = SubsystemLayout((3,))
        with self.assertRaises(NormalizationError) as caught:
            ket_from_amplitudes(layout, [1, 1, 1])
        self.assertAlmostEqual(caught.exception.norm, math.sqrt(3))
        ket = ket_from_amplitudes(layout, [1, 1, 1], normalize=True)
        self.assertTrue(ket.is_normalized())

    def test_zero_vector_cannot_be_normalized(self):
        with self.assertRaises(NormalizationError):
            Ket(SubsystemLayout((2,)), np.zeros(2)).normalized()

    def test_wrong_amplitude_count(self):
        with self.assertRaises(DimensionError):
            Ket(SubsystemLayout((2, 2)), np.ones(3))

    def test_amplitudes_are_read_only(self):
        ket = qubit_ket(1, 0)
        with self.assertRaises(ValueError):
            ket.amplitudes[0] = 0

    def test_tensor_product_places_first_factor_most_significant(self):
        up, down = qubit_ket(1, 0), qubit_ket(0, 1)
        product = tensor_kets(down, up)
        np.testing.assert_allclose(product.amplitudes, [0, 0, 1, 0])
        self.assertEqual(product.layout.dims, (2, 2))

    def test_same_ray_ignores_global_phase(self):
        ket = ket_from_amplitudes(SubsystemLayout((2,)), [0.6, 0.8])
        self.assertTrue(same_ray(ket, ket.scaled(np.exp(1j * 0.7))))
        self.assertFalse(same_ray(ket, qubit_ket(1, 0)))

    def test_subsystem_probabilities(self):
        layout = SubsystemLayout.qubits(2)
        ket = ket_from_amplitudes(layout, [1, 1, 1, 0], normalize=True)
        np.testing.assert_allclose(ket.subsystem_probabilities(0), [2 / 3, 1 / 3])
        np.testing.assert_allclose(ket.subsystem_probabilities(1), [2 / 3, 1 / 3])


class OperatorTests(SimpleTestCase):
    def test_lift_matches_kronecker_product(self):
        layout = SubsystemLayout((2, 3, 2))
        lifted = lift_to_subsystem(SIGMA_X, 2, layout)
        expected = np.kron(np.eye(6), SIGMA_X)
        np.testing.assert_allclose(lifted.entries, expected)

    def test_lift_rejects_wrong_local_dimension(self):
        with self.assertRaises(DimensionError):
            lift_to_subsystem(SIGMA_X, 1, SubsystemLayout((2, 3)))

    def test_tensor_operators_keeps_projector_flag(self):
        up = projector_onto(qubit_ket(1, 0))
        self.assertTrue(tensor_operators(up, up).is_projector)
        self.assertFalse(tensor_operators(up, Operator.from_matrix(SIGMA_Z)).is_projector)

    def test_projector_flag_is_checked(self):
        from quantum.exceptions import InvalidObservableError
        with self.assertRaises(InvalidObservableError):
            Operator.from_matrix(SIGMA_X, is_projector=True)

    def test_paulis_on_different_qubits_commute(self):
        layout = SubsystemLayout.qubits(2)
        self.assertEqual(commutator_norm(pauli('x', 0, layout), pauli('z', 1, layout)), 0.0)
        self.assertGreater(commutator_norm(pauli('x', 0, layout), pauli('z', 0, layout)), 1.0)

    def test_expectation_and_apply(self):
        layout = SubsystemLayout.qubits(2)
        ket = basis_ket(layout, [1, 0])
        self.assertAlmostEqual(expectation(pauli('z', 0, layout), ket).real, -1.0)
        flipped = apply(pauli('x', 1, layout), ket)
        self.assertAlmostEqual(fidelity(flipped, basis_ket(layout, [1, 1])), 1.0)

    def test_inner_product_is_antilinear_in_the_bra(self):
        layout = SubsystemLayout((2,))
        a = ket_from_amplitudes(layout, [1, 1j], normalize=True)
        b = ket_from_amplitudes(layout, [1, 0])
        self.assertAlmostEqual(inner_product(a, b), 1 / math.sqrt(2))
        self.assertAlmostEqual(inner_product(b, a), 1 / math.sqrt(2))
        self.assertAlmostEqual(inner_product(a, a.scaled(1j)), 1j)

    def test_layout_mismatch(self):
        with self.assertRaises(DimensionError):
            inner_product(qubit_ket(1, 0), basis_ket(SubsystemLayout((3,)), [0]))
