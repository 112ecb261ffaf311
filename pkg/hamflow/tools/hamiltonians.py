"""
Hamiltonian models H(t, r, p) and the modified Hamiltonian H + p_0 c.

Models evaluate at a single phase point with spatial 3-vectors ``r`` and
``p``. Derivatives are analytic for the built-in models; anything a model
does not override falls back to central finite differences.
"""

from __future__ import annotations

import abc
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from hamflow.tools.errors import ModelDomainError, NumericalError
from hamflow.tools.finite_difference import fd_gradient
from hamflow.tools.geometry import FourContravariantVector, FourCovector, PhasePoint
from hamflow.tools.potentials import (
    ZERO_POTENTIAL,
    ZERO_VECTOR_POTENTIAL,
    IndexField,
    ScalarField,
    VectorField,
)

__all__ = [
    "fd_gradient",
    "HamiltonianModel",
    "FreeNonRelativistic",
    "Relativistic",
    "ChargedCanonical",
    "OpticsRay",
    "ModifiedHamiltonian",
    "eval_modified",
    "grad_modified",
    "phase_gradient",
    "time_rate",
    "MODEL_CATALOG",
    "list_models",
]

logger = logging.getLogger(__name__)


class HamiltonianModel(abc.ABC):
    """An energy function H(t, r, p) with its partial derivatives."""

    name = "model"

    @abc.abstractmethod
    def eval(self, t: float, r: np.ndarray, p: np.ndarray) -> float:
        """Energy at the phase point."""

    def grad_r(self, t: float, r: np.ndarray, p: np.ndarray) -> np.ndarray:
        return self.numerical_grad_r(t, r, p)

    def grad_p(self, t: float, r: np.ndarray, p: np.ndarray) -> np.ndarray:
        return self.numerical_grad_p(t, r, p)

    def dt(self, t: float, r: np.ndarray, p: np.ndarray) -> float:
        return self.numerical_dt(t, r, p)

    def numerical_grad_r(self, t, r, p) -> np.ndarray:
        return fd_gradient(lambda x: self.eval(t, x, p), r)

    def numerical_grad_p(self, t, r, p) -> np.ndarray:
        return fd_gradient(lambda x: self.eval(t, r, x), p)

    def numerical_dt(self, t, r, p) -> float:
        return float(fd_gradient(lambda s: self.eval(s[0], r, p), [t])[0])


def _sqrt_energy(c: float, mass: float, u: np.ndarray, r: np.ndarray, p: np.ndarray) -> float:
    """c sqrt(m^2 c^2 + |u|^2), the kinetic part of the relativistic energy."""
    arg = mass * mass * c * c + float(u @ u)
    if not arg > 0.0:
        raise ModelDomainError(f"m^2 c^2 + |u|^2 must be positive ({arg}) at r={r.tolist()}, p={p.tolist()}")
    return c * math.sqrt(arg)


@dataclass(frozen=True)
class FreeNonRelativistic(HamiltonianModel):
    """H = |p|^2 / 2m + V(r, t)."""

    mass: float = 1.0
    potential: ScalarField = ZERO_POTENTIAL
    name = "free_nonrel"

    def __post_init__(self):
        if not self.mass > 0.0:
            raise ValueError("mass must be positive")

    def eval(self, t, r, p):
        return float(p @ p) / (2.0 * self.mass) + float(self.potential.value(r, t))

    def grad_r(self, t, r, p):
        return np.asarray(self.potential.gradient(r, t), dtype=float)

    def grad_p(self, t, r, p):
        return p / self.mass

    def dt(self, t, r, p):
        return float(self.potential.time_derivative(r, t))


@dataclass(frozen=True)
class Relativistic(HamiltonianModel):
    """H = c sqrt(m^2 c^2 + |p|^2) + V(r, t)."""

    mass: float = 1.0
    c: float = 1.0
    potential: ScalarField = ZERO_POTENTIAL
    name = "relativistic"

    def __post_init__(self):
        if self.mass < 0.0 or not self.c > 0.0:
            raise ValueError("mass must be non-negative and c positive")

    def eval(self, t, r, p):
        kinetic = _sqrt_energy(self.c, self.mass, p, r, p)
        return kinetic + float(self.potential.value(r, t))

    def grad_r(self, t, r, p):
        return np.asarray(self.potential.gradient(r, t), dtype=float)

    def grad_p(self, t, r, p):
        kinetic = _sqrt_energy(self.c, self.mass, p, r, p)
        return self.c * self.c * p / kinetic

    def dt(self, t, r, p):
        return float(self.potential.time_derivative(r, t))


@dataclass(frozen=True)
class ChargedCanonical(HamiltonianModel):
    """
    Minimal coupling with canonical momentum p:
    H = c sqrt(m^2 c^2 + |p - (e/c) A|^2) + e Phi.
    """

    mass: float = 1.0
    charge: float = 1.0
    c: float = 1.0
    scalar_potential: ScalarField = ZERO_POTENTIAL
    vector_potential: VectorField = ZERO_VECTOR_POTENTIAL
    name = "charged_canonical"

    def __post_init__(self):
        if self.mass < 0.0 or not self.c > 0.0:
            raise ValueError("mass must be non-negative and c positive")

    def kinetic_momentum(self, t, r, p) -> np.ndarray:
        """pi = p - (e/c) A(r, t)."""
        return p - (self.charge / self.c) * np.asarray(self.vector_potential.value(r, t), dtype=float)

    def _velocity(self, t, r, p):
        u = self.kinetic_momentum(t, r, p)
        kinetic = _sqrt_energy(self.c, self.mass, u, r, p)
        return self.c * self.c * u / kinetic

    def eval(self, t, r, p):
        u = self.kinetic_momentum(t, r, p)
        kinetic = _sqrt_energy(self.c, self.mass, u, r, p)
        return kinetic + self.charge * float(self.scalar_potential.value(r, t))

    def grad_r(self, t, r, p):
        velocity = self._velocity(t, r, p)
        jacobian = np.asarray(self.vector_potential.jacobian(r, t), dtype=float)
        grad_phi = np.asarray(self.scalar_potential.gradient(r, t), dtype=float)
        return -(self.charge / self.c) * (jacobian.T @ velocity) + self.charge * grad_phi

    def grad_p(self, t, r, p):
        return self._velocity(t, r, p)

    def dt(self, t, r, p):
        velocity = self._velocity(t, r, p)
        dadt = np.asarray(self.vector_potential.time_derivative(r, t), dtype=float)
        dphidt = float(self.scalar_potential.time_derivative(r, t))
        return -(self.charge / self.c) * float(velocity @ dadt) + self.charge * dphidt


@dataclass(frozen=True)
class OpticsRay(HamiltonianModel):
    """
    Ray Hamiltonian H = c |p| / n(r, t) of geometrical optics.

    With p = hbar k the on-shell energy is hbar omega.
    """

    index: IndexField
    c: float = 1.0
    name = "optics_ray"

    def _norm(self, p, r):
        norm = math.sqrt(float(p @ p))
        if norm == 0.0:
            raise ModelDomainError(f"Ray momentum must be non-zero at r={r.tolist()}")
        return norm

    def eval(self, t, r, p):
        return self.c * self._norm(p, r) / self.index.checked_value(r, t)

    def grad_r(self, t, r, p):
        n = self.index.checked_value(r, t)
        return -self.c * self._norm(p, r) * np.asarray(self.index.gradient(r, t), dtype=float) / (n * n)

    def grad_p(self, t, r, p):
        n = self.index.checked_value(r, t)
        return self.c * p / (self._norm(p, r) * n)

    def dt(self, t, r, p):
        n = self.index.checked_value(r, t)
        return -self.c * self._norm(p, r) * float(self.index.time_derivative(r, t)) / (n * n)


@dataclass(frozen=True)
class ModifiedHamiltonian:
    """The modified Hamiltonian H(t, r, p) + p_0 c, a function on 8D phase space."""

    model: HamiltonianModel
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0.0:
            raise ValueError("c must be positive")

    def eval_array(self, t: float, y: np.ndarray) -> float:
        return self.model.eval(t, y[1:4], y[5:8]) + y[4] * self.c

    def grad_array(self, t: float, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """
        Partial derivatives with respect to (r^a, p_a) as plain arrays.

        :return: (dH/dr^a, dH/dp_a), the first with time component
            (1/c) dH/dt and the second with time component c.
        """
        r, p = y[1:4], y[5:8]
        grad = np.empty(8)
        grad[0] = self.model.dt(t, r, p) / self.c
        grad[1:4] = self.model.grad_r(t, r, p)
        grad[4] = self.c
        grad[5:8] = self.model.grad_p(t, r, p)
        if not np.isfinite(grad).all():
            raise NumericalError(f"Non-finite derivative of {self.model.name} at t={t}, r={r.tolist()}, p={p.tolist()}")
        return grad[:4], grad[4:]

    def eval(self, state: PhasePoint) -> float:
        return self.eval_array(state.t, state.as_array())

    def grad(self, state: PhasePoint) -> tuple[FourCovector, FourContravariantVector]:
        d_r, d_p = self.grad_array(state.t, state.as_array())
        return FourCovector.from_array(d_r), FourContravariantVector.from_array(d_p)


def eval_modified(state: PhasePoint, mh: ModifiedHamiltonian) -> float:
    """H(t, r, p) + p_0 c at the given phase point."""
    return mh.eval(state)


def grad_modified(state: PhasePoint, mh: ModifiedHamiltonian) -> tuple[FourCovector, FourContravariantVector]:
    """Gradient of the modified Hamiltonian; dP^0 is c identically."""
    return mh.grad(state)


def modified_phase_function(mh: ModifiedHamiltonian) -> Callable[[np.ndarray], float]:
    """The modified Hamiltonian as a function of the 8 phase components, with t = r0/c."""
    return lambda y: mh.model.eval(y[0] / mh.c, y[1:4], y[5:8]) + y[4] * mh.c


def plain_phase_function(model: HamiltonianModel, c: float = 1.0) -> Callable[[np.ndarray], float]:
    """The ordinary Hamiltonian as a function of the 8 phase components, with t = r0/c."""
    return lambda y: model.eval(y[0] / c, y[1:4], y[5:8])


def phase_gradient(state: PhasePoint, func: Callable[[np.ndarray], float]) -> np.ndarray:
    """Finite-difference gradient of ``func`` over (r0, x, y, z, p0, px, py, pz)."""
    return fd_gradient(func, state.as_array())


def time_rate(state: PhasePoint, func: Callable[[np.ndarray], float], c: float = 1.0) -> float:
    """
    dt/dt implied by canonical equations generated by ``func``.

    The ordinary Hamiltonian has no p_0 dependence and gives 0; the
    modified one gives 1.
    """
    return float(phase_gradient(state, func)[4]) / c


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    model: type
    formula: str
    parameters: tuple[str, ...] = field(default_factory=tuple)


MODEL_CATALOG = {
    entry.name: entry
    for entry in (
        CatalogEntry("free_nonrel", FreeNonRelativistic, "H = |p|^2/(2m) + V(r,t)", ("mass", "potential")),
        CatalogEntry("relativistic", Relativistic, "H = c sqrt(m^2 c^2 + |p|^2) + V(r,t)", ("mass", "c", "potential")),
        CatalogEntry(
            "charged_canonical",
            ChargedCanonical,
            "H = c sqrt(m^2 c^2 + |p - (e/c)A|^2) + e Phi",
            ("mass", "charge", "c", "field"),
        ),
        CatalogEntry("optics_ray", OpticsRay, "H = c |p| / n(r,t)", ("c", "index")),
    )
}


def list_models() -> list[CatalogEntry]:
    """Built-in models in a stable order."""
    return [MODEL_CATALOG[name] for name in sorted(MODEL_CATALOG)]
