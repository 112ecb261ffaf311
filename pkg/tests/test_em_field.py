"""Test the field tensor and the gauge force term."""

from unittest import TestCase

import numpy as np

from hamflow.tools.em_field import (
    LEVI_CIVITA,
    ZERO_FIELD,
    CrossedFields,
    FieldTensor,
    RampElectric,
    UniformElectric,
    UniformMagnetic,
    field_tensor_from_EB,
    force_term,
    work_contraction,
)
from hamflow.tools.geometry import FourContravariantVector


class FieldTensorTestCase(TestCase):

    def test_zero_field(self):
        np.testing.assert_array_equal(field_tensor_from_EB((0, 0, 0), (0, 0, 0)).components, np.zeros((4, 4)))
        np.testing.assert_array_equal(ZERO_FIELD.components, np.zeros((4, 4)))

    def test_antisymmetric(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            F = field_tensor_from_EB(rng.normal(size=3), rng.normal(size=3)).components
            np.testing.assert_array_equal(F, -F.T)

    def test_magnetic_components(self):
        F = field_tensor_from_EB((0, 0, 0), (0, 0, 2.5)).components
        self.assertEqual(F[1, 2], 2.5)
        self.assertEqual(F[2, 1], -2.5)
        np.testing.assert_array_equal(F[1:, 0], np.zeros(3))
        np.testing.assert_array_equal(F[0, 1:], np.zeros(3))

    def test_electric_components(self):
        F = field_tensor_from_EB((1.0, -2.0, 3.0), (0, 0, 0)).components
        np.testing.assert_array_equal(F[1:, 0], [1.0, -2.0, 3.0])
        np.testing.assert_array_equal(F[0, 1:], [-1.0, 2.0, -3.0])

    def test_round_trip(self):
        F = field_tensor_from_EB((0.3, 0.1, -0.2), (1.5, -0.5, 0.25))
        np.testing.assert_allclose(F.electric(), [0.3, 0.1, -0.2])
        np.testing.assert_allclose(F.magnetic(), [1.5, -0.5, 0.25])

    def test_rejects_bad_tensors(self):
        with self.assertRaises(ValueError):
            FieldTensor(np.ones((4, 4)))
        with self.assertRaises(ValueError):
            FieldTensor(np.zeros((3, 3)))
        with self.assertRaises(ValueError):
            field_tensor_from_EB((np.nan, 0, 0), (0, 0, 0))

    def test_read_only(self):
        F = field_tensor_from_EB((1, 0, 0), (0, 0, 1))
        with self.assertRaises(ValueError):
            F.components[0, 1] = 3.0


class ForceTermTestCase(TestCase):

    def test_at_rest_in_electric_field(self):
        c, e = 2.0, 0.5
        E = np.array([1.0, 2.0, 3.0])
        force = force_term(field_tensor_from_EB(E, (0, 0, 0)), FourContravariantVector(c, 0, 0, 0), e, c)
        np.testing.assert_allclose(force.spatial, e * E, rtol=1e-15)
        self.assertEqual(force.c0, 0.0)

    def test_at_rest_in_magnetic_field(self):
        force = force_term(field_tensor_from_EB((0, 0, 0), (0.3, 0.0, 1.0)), FourContravariantVector(1, 0, 0, 0), 1.0)
        np.testing.assert_array_equal(force.as_array(), np.zeros(4))

    def test_lorentz_force(self):
        c, e = 3.0, -1.2
        E = np.array([0.2, -0.1, 0.4])
        B = np.array([0.5, 1.0, -0.3])
        v = np.array([0.6, 0.2, -1.1])
        force = force_term(field_tensor_from_EB(E, B), FourContravariantVector(c, *v), e, c)
        np.testing.assert_allclose(force.spatial, e * (E + np.cross(v, B) / c), rtol=1e-14, atol=1e-15)
        self.assertAlmostEqual(force.c0, -(e / c) * float(E @ v), delta=1e-15)

    def test_work_contraction_vanishes(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            F = field_tensor_from_EB(rng.normal(size=3), rng.normal(size=3))
            rdot = FourContravariantVector.from_array(rng.normal(size=4))
            self.assertLessEqual(abs(work_contraction(F, rdot, rng.normal(), 1.0)), 1e-12)


class FieldConfigTestCase(TestCase):

    @staticmethod
    def curl(jacobian):
        return np.einsum("ijk,kj->i", LEVI_CIVITA, jacobian)

    def test_potentials_reproduce_crossed_fields(self):
        c = 2.0
        E, B = (0.1, -0.2, 0.05), (0.3, 0.0, 1.2)
        config = CrossedFields(E, B)
        r, t = np.array([0.4, -1.0, 2.0]), 0.7
        electric = -config.scalar_potential().gradient(r, t) - config.vector_potential().time_derivative(r, t) / c
        np.testing.assert_allclose(electric, E, atol=1e-15)
        np.testing.assert_allclose(self.curl(config.vector_potential().jacobian(r, t)), B, atol=1e-15)

    def test_ramp_potential(self):
        config = RampElectric((0.5, 0.0, -0.1))
        r, t = np.array([1.0, 2.0, 3.0]), 4.0
        np.testing.assert_allclose(-config.scalar_potential().gradient(r, t), t * np.array([0.5, 0.0, -0.1]))
        np.testing.assert_allclose(config.at(r, t).electric(), t * np.array([0.5, 0.0, -0.1]))

    def test_uniform_configs(self):
        np.testing.assert_array_equal(UniformElectric((1, 2, 3)).at(np.zeros(3), 0.0).magnetic(), np.zeros(3))
        np.testing.assert_allclose(UniformMagnetic((0, 0, 2)).at(np.zeros(3), 5.0).magnetic(), [0, 0, 2])
        np.testing.assert_array_equal(UniformMagnetic((0, 0, 2)).scalar_potential().value(np.ones(3), 0.0), 0.0)
