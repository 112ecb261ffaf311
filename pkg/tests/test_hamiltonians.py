"""Test the Hamiltonian models and the modified Hamiltonian."""

import math
from unittest import TestCase

import numpy as np

from hamflow.tools.errors import ModelDomainError, NumericalError
from hamflow.tools.finite_difference import fd_gradient, step_sizes
from hamflow.tools.geometry import FourContravariantVector, FourCovector, FourPosition, PhasePoint, on_shell_init
from hamflow.tools.hamiltonians import (
    ChargedCanonical,
    FreeNonRelativistic,
    ModifiedHamiltonian,
    OpticsRay,
    Relativistic,
    eval_modified,
    grad_modified,
    list_models,
    modified_phase_function,
    plain_phase_function,
    time_rate,
)
from hamflow.tools.potentials import (
    CallablePotential,
    HarmonicPotential,
    LinearGradientIndex,
    LinearPotential,
    RampPotential,
    SinePotential,
    SymmetricGaugePotential,
    UniformIndex,
)


def point(t, r, p0, p, c=1.0):
    return PhasePoint(t, FourPosition(c * t, *r), FourCovector(p0, *p))


def random_models():
    return [
        FreeNonRelativistic(1.3, HarmonicPotential(2.0, (0.1, 0.0, -0.2)) + SinePotential((0.3, -0.1, 0.2), 1.7)),
        Relativistic(0.8, 2.0, LinearPotential((0.5, 0.1, 0.0)) + RampPotential((0.0, -0.3, 0.2))),
        ChargedCanonical(1.5, 0.7, 2.0, RampPotential((-0.2, 0.1, 0.05)), SymmetricGaugePotential((0.3, -0.2, 1.1))),
        OpticsRay(LinearGradientIndex(1.5, 0.05, (1.0, 1.0, 0.0)), 1.0),
    ]


class FiniteDifferenceTestCase(TestCase):

    def test_quadratic(self):
        grad = fd_gradient(lambda x: x[0] ** 2, [3.0], [1.0])
        self.assertAlmostEqual(grad[0], 6.0, delta=1e-6)

    def test_constant(self):
        self.assertEqual(fd_gradient(lambda x: 4.2, [1.0, -2.0])[1], 0.0)

    def test_sine(self):
        self.assertAlmostEqual(fd_gradient(lambda x: math.sin(x[0]), [0.0], [1.0])[0], 1.0, delta=1e-9)

    def test_step_policy(self):
        np.testing.assert_allclose(step_sizes([0.0, 1e3, -2.0]), [1e-8, 1e-3, 2e-6])

    def test_non_finite(self):
        with self.assertRaises(NumericalError):
            fd_gradient(lambda x: math.inf, [1.0])


class ModifiedHamiltonianTestCase(TestCase):

    def test_on_shell_zero(self):
        for model in random_models():
            c = getattr(model, "c", 1.0)
            state = on_shell_init(0.4, [0.3, 0.2, -0.1], [0.5, -0.2, 0.4], model, c)
            self.assertLessEqual(abs(eval_modified(state, ModifiedHamiltonian(model, c))), 4 * np.spacing(state.energy(c)))

    def test_arithmetic(self):
        mh = ModifiedHamiltonian(Relativistic(mass=4.0, c=1.0), 1.0)
        self.assertEqual(eval_modified(point(0.0, [0, 0, 0], -4.0, [3, 0, 0]), mh), 1.0)

    def test_free_on_shell(self):
        mh = ModifiedHamiltonian(FreeNonRelativistic(2.0), 1.0)
        state = point(0.0, [0, 0, 0], -1.0, [2, 0, 0])
        self.assertEqual(mh.model.eval(0.0, state.spatial_position, state.spatial_momentum), 1.0)
        self.assertEqual(eval_modified(state, mh), 0.0)

    def test_linear_in_p0(self):
        mh = ModifiedHamiltonian(Relativistic(1.0, 3.0, HarmonicPotential()), 3.0)
        base = point(0.2, [0.5, 0.1, 0.0], -2.0, [0.3, 0.1, 0.2], 3.0)
        shifted = point(0.2, [0.5, 0.1, 0.0], -2.0 + 0.125, [0.3, 0.1, 0.2], 3.0)
        self.assertAlmostEqual(eval_modified(shifted, mh) - eval_modified(base, mh), 3.0 * 0.125, delta=1e-14)

    def test_time_component_of_velocity(self):
        rng = np.random.default_rng(3)
        for model in random_models():
            c = getattr(model, "c", 1.0)
            mh = ModifiedHamiltonian(model, c)
            for _ in range(10):
                state = point(rng.uniform(0, 2), rng.uniform(-1, 1, 3), rng.normal(), rng.uniform(-1, 1, 3), c)
                _, d_p = grad_modified(state, mh)
                self.assertIsInstance(d_p, FourContravariantVector)
                self.assertEqual(d_p.v0, c)

    def test_free_gradient(self):
        mh = ModifiedHamiltonian(FreeNonRelativistic(1.0), 1.0)
        d_r, d_p = grad_modified(point(0.0, [1, 2, 3], -4.5, [3, 0, 0]), mh)
        np.testing.assert_array_equal(d_p.spatial, [3, 0, 0])
        np.testing.assert_array_equal(d_r.as_array(), [0, 0, 0, 0])

    def test_time_dependent_gradient(self):
        c = 2.0
        g = (0.4, -0.3, 0.2)
        model = FreeNonRelativistic(1.0, SinePotential(g, 1.5))
        r = np.array([0.7, 0.2, -0.5])
        t = 0.9
        d_r, _ = grad_modified(point(t, r, -1.0, [0.1, 0.0, 0.0], c), ModifiedHamiltonian(model, c))
        expected = 1.5 * math.cos(1.5 * t) * float(r @ np.array(g)) / c
        self.assertAlmostEqual(d_r.c0, expected, delta=1e-15)
        numerical = model.numerical_dt(t, r, np.array([0.1, 0.0, 0.0])) / c
        self.assertAlmostEqual(d_r.c0, numerical, delta=1e-8)

    def test_analytic_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        for model in random_models():
            for _ in range(100):
                t = rng.uniform(0.0, 3.0)
                r = rng.uniform(-2.0, 2.0, 3)
                p = rng.uniform(-2.0, 2.0, 3)
                scale = 1.0 + abs(model.eval(t, r, p))
                for analytic, numerical in (
                    (model.grad_r(t, r, p), model.numerical_grad_r(t, r, p)),
                    (model.grad_p(t, r, p), model.numerical_grad_p(t, r, p)),
                    (model.dt(t, r, p), model.numerical_dt(t, r, p)),
                ):
                    np.testing.assert_allclose(analytic, numerical, rtol=1e-6, atol=1e-6 * scale, err_msg=model.name)

    def test_non_finite_derivative(self):
        model = FreeNonRelativistic(1.0, CallablePotential(lambda r, t: math.inf))
        mh = ModifiedHamiltonian(model, 1.0)
        with self.assertRaises(NumericalError):
            grad_modified(point(0.0, [0, 0, 0], 0.0, [1, 0, 0]), mh)


class UnmodifiedHamiltonianTestCase(TestCase):
    """The ordinary Hamiltonian cannot generate the time equation."""

    def test_plain_hamiltonian_freezes_time(self):
        model = Relativistic(1.0, 2.0, SinePotential((0.2, 0.0, 0.0), 1.0))
        state = on_shell_init(0.5, [0.3, 0.0, 0.0], [0.4, 0.1, 0.0], model, 2.0)
        self.assertEqual(time_rate(state, plain_phase_function(model, 2.0), 2.0), 0.0)

    def test_modified_hamiltonian_advances_time(self):
        model = Relativistic(1.0, 2.0, SinePotential((0.2, 0.0, 0.0), 1.0))
        mh = ModifiedHamiltonian(model, 2.0)
        state = on_shell_init(0.5, [0.3, 0.0, 0.0], [0.4, 0.1, 0.0], model, 2.0)
        self.assertAlmostEqual(time_rate(state, modified_phase_function(mh), 2.0), 1.0, places=8)


class DomainTestCase(TestCase):

    def test_optics_zero_momentum(self):
        with self.assertRaises(ModelDomainError):
            OpticsRay(UniformIndex(1.0)).eval(0.0, np.zeros(3), np.zeros(3))

    def test_optics_non_positive_index(self):
        model = OpticsRay(LinearGradientIndex(1.0, 1.0))
        with self.assertRaises(ModelDomainError):
            model.eval(0.0, np.array([-2.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0]))

    def test_massless_at_rest(self):
        with self.assertRaises(ModelDomainError):
            Relativistic(0.0).grad_p(0.0, np.zeros(3), np.zeros(3))

    def test_invalid_parameters(self):
        with self.assertRaises(ValueError):
            FreeNonRelativistic(0.0)
        with self.assertRaises(ValueError):
            ModifiedHamiltonian(FreeNonRelativistic(), 0.0)

    def test_catalog(self):
        self.assertEqual(
            [entry.name for entry in list_models()],
            ["charged_canonical", "free_nonrel", "optics_ray", "relativistic"],
        )

    def test_optics_on_shell_frequency(self):
        hbar, omega, n0 = 0.5, 3.0, 1.5
        model = OpticsRay(UniformIndex(n0), 1.0)
        k = omega * n0
        state = on_shell_init(0.0, np.zeros(3), [hbar * k, 0.0, 0.0], model)
        self.assertAlmostEqual(state.momentum.c0, -hbar * omega, delta=1e-14)
