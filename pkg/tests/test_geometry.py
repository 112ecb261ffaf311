"""Test the Minkowski 4-vector algebra."""

from unittest import TestCase

import numpy as np

from hamflow.tools.errors import ModelDomainError
from hamflow.tools.geometry import (
    MINKOWSKI,
    FourContravariantVector,
    FourCovector,
    FourPosition,
    PhasePoint,
    lower_index,
    minkowski_contract,
    minkowski_square,
    momentum_covector,
    on_shell_init,
    raise_index,
    wave_covector,
)
from hamflow.tools.hamiltonians import FreeNonRelativistic, ModifiedHamiltonian, Relativistic
from hamflow.tools.potentials import HarmonicPotential


class IndexTestCase(TestCase):

    def test_raise_index(self):
        self.assertEqual(raise_index(FourCovector(1, 0, 0, 0)), FourContravariantVector(-1, 0, 0, 0))
        self.assertEqual(raise_index(FourCovector(0, 1, 2, 3)), FourContravariantVector(0, 1, 2, 3))
        self.assertEqual(raise_index(FourCovector(-2, 1, 0, 0)), FourContravariantVector(2, 1, 0, 0))

    def test_raise_lower_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            v = FourCovector.from_array(rng.normal(size=4))
            self.assertEqual(lower_index(raise_index(v)), v)
            u = FourContravariantVector.from_array(rng.normal(size=4))
            self.assertEqual(raise_index(lower_index(u)), u)

    def test_metric(self):
        np.testing.assert_array_equal(MINKOWSKI.matrix(), np.diag([-1.0, 1.0, 1.0, 1.0]))
        with self.assertRaises(ValueError):
            MINKOWSKI.signature[0] = 1.0

    def test_contract(self):
        self.assertEqual(minkowski_contract(FourContravariantVector(1, 0, 0, 0), FourCovector(1, 0, 0, 0)), 1.0)
        self.assertEqual(minkowski_contract(FourContravariantVector(1, 1, 0, 0), FourCovector(-1, 1, 0, 0)), 0.0)
        self.assertEqual(minkowski_contract(FourContravariantVector(2, 3, 0, 0), FourCovector(1, -1, 0, 0)), -1.0)

    def test_square(self):
        self.assertEqual(minkowski_square(FourContravariantVector(1, 0, 0, 0)), -1.0)
        self.assertEqual(minkowski_square(FourPosition(1, 1, 0, 0)), 0.0)

    def test_non_finite_rejected(self):
        with self.assertRaises(ValueError):
            FourPosition(float("nan"), 0, 0, 0)
        with self.assertRaises(ValueError):
            FourCovector(0, float("inf"), 0, 0)
        with self.assertRaises(ValueError):
            FourCovector.from_array([1.0, 2.0, 3.0])

    def test_de_broglie(self):
        momentum = FourCovector(-2.0, 0.5, 0.0, 1.0)
        k = wave_covector(momentum, hbar=0.5)
        np.testing.assert_allclose(k.as_array(), [-4.0, 1.0, 0.0, 2.0])
        self.assertEqual(momentum_covector(k, hbar=0.5), momentum)


class PhasePointTestCase(TestCase):

    def test_array_layout(self):
        point = PhasePoint.from_array(0.5, np.arange(8.0))
        self.assertEqual(point.position, FourPosition(0, 1, 2, 3))
        self.assertEqual(point.momentum, FourCovector(4, 5, 6, 7))
        np.testing.assert_array_equal(point.as_array(), np.arange(8.0))
        np.testing.assert_array_equal(point.spatial_momentum, [5, 6, 7])

    def test_on_shell_free_at_rest(self):
        point = on_shell_init(0.0, [0, 0, 0], [0, 0, 0], FreeNonRelativistic(1.0))
        self.assertEqual(point.momentum.c0, 0.0)

    def test_on_shell_rest_energy(self):
        point = on_shell_init(0.0, [0, 0, 0], [0, 0, 0], Relativistic(mass=1.0, c=1.0))
        self.assertEqual(point.momentum.c0, -1.0)
        self.assertEqual(point.energy(1.0), 1.0)

    def test_on_shell_moving(self):
        point = on_shell_init(0.0, [0, 0, 0], [3, 0, 0], Relativistic(mass=4.0, c=1.0))
        self.assertEqual(point.momentum.c0, -5.0)

    def test_on_shell_constraint_and_lockstep(self):
        c = 3.0
        model = Relativistic(mass=2.0, c=c, potential=HarmonicPotential(0.7))
        mh = ModifiedHamiltonian(model, c)
        point = on_shell_init(0.3, [0.1, -0.4, 1.2], [1.0, 2.0, 3.0], model, c)
        energy = point.energy(c)
        self.assertLessEqual(abs(mh.eval(point)), 4 * np.spacing(energy))
        self.assertEqual(point.lockstep_error(c), 0.0)
        self.assertEqual(point.position.r0, c * 0.3)

    def test_on_shell_domain_error(self):
        with self.assertRaises(ModelDomainError):
            on_shell_init(0.0, [0, 0, 0], [0, 0, 0], Relativistic(mass=0.0))
