"""
Electromagnetic field tensor F_ab and the gauge force term (e/c) F_ab rdot^b.

Gaussian units. The component table is fixed by requiring the spatial part
of the gauge-field equations to give dpi/dt = e (E + v x B / c) and the time
part to give the work law d(eps)/dt = e E . v:

    F_i0 = E_i,  F_0i = -E_i,  F_ij = eps_ijk B_k.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Callable

import numpy as np

from hamflow.tools.geometry import FourContravariantVector, FourCovector
from hamflow.tools.potentials import (
    ZERO_POTENTIAL,
    ZERO_VECTOR_POTENTIAL,
    LinearPotential,
    RampPotential,
    ScalarField,
    SymmetricGaugePotential,
    VectorField,
)


LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0
LEVI_CIVITA.flags.writeable = False


def _vector(values) -> np.ndarray:
    values = np.asarray(values, dtype=float).reshape(3)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"Field vector must be finite, got {values.tolist()}")
    return values


@dataclass(frozen=True, eq=False)
class FieldTensor:
    """Covariant antisymmetric components F_ab of a field at one event."""

    components: np.ndarray

    def __post_init__(self):
        components = np.array(self.components, dtype=float)
        if components.shape != (4, 4):
            raise ValueError(f"Field tensor must be 4x4, got shape {components.shape}")
        if not np.all(np.isfinite(components)):
            raise ValueError("Field tensor components must be finite")
        if not np.array_equal(components, -components.T):
            raise ValueError("Field tensor must be antisymmetric")
        components.flags.writeable = False
        object.__setattr__(self, "components", components)

    def at(self, r, t: float) -> FieldTensor:
        """A constant tensor is the same at every event."""
        return self

    def electric(self) -> np.ndarray:
        return self.components[1:, 0].copy()

    def magnetic(self) -> np.ndarray:
        return 0.5 * np.einsum("ijk,ij->k", LEVI_CIVITA, self.components[1:, 1:])


def field_tensor_from_EB(E, B) -> FieldTensor:
    """Assemble F_ab from the electric and magnetic 3-vectors."""
    E = _vector(E)
    B = _vector(B)
    components = np.zeros((4, 4))
    components[1:, 0] = E
    components[0, 1:] = -E
    components[1:, 1:] = np.einsum("ijk,k->ij", LEVI_CIVITA, B)
    return FieldTensor(components)


ZERO_FIELD = field_tensor_from_EB((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))


def force_term_array(F: np.ndarray, rdot: np.ndarray, e: float, c: float) -> np.ndarray:
    return (e / c) * (F @ rdot)


def force_term(F: FieldTensor, rdot: FourContravariantVector, e: float, c: float = 1.0) -> FourCovector:
    """
    The gauge force (e/c) F_ab rdot^b.

    For a particle at rest (rdot = (c, 0, 0, 0)) the spatial part is e E.
    """
    return FourCovector.from_array(force_term_array(F.components, rdot.as_array(), e, c))


def work_contraction(F: FieldTensor, rdot: FourContravariantVector, e: float, c: float = 1.0) -> float:
    """(e/c) F_ab rdot^a rdot^b, zero by antisymmetry."""
    rdot_array = rdot.as_array()
    return float(force_term_array(F.components, rdot_array, e, c) @ rdot_array)


class FieldConfig(abc.ABC):
    """A possibly event-dependent external field."""

    kind = "field"

    @abc.abstractmethod
    def fields(self, r, t: float) -> tuple[np.ndarray, np.ndarray]:
        """E and B at r and t."""

    def at(self, r, t: float) -> FieldTensor:
        E, B = self.fields(r, t)
        return field_tensor_from_EB(E, B)

    def scalar_potential(self) -> ScalarField:
        raise ValueError(f"Field '{self.kind}' has no closed-form scalar potential")

    def vector_potential(self) -> VectorField:
        raise ValueError(f"Field '{self.kind}' has no closed-form vector potential")


@dataclass(frozen=True)
class UniformElectric(FieldConfig):
    """Uniform E with Phi = -E . r."""

    E: tuple[float, float, float]
    kind = "uniform_E"

    def fields(self, r, t):
        return _vector(self.E), np.zeros(3)

    def scalar_potential(self):
        return LinearPotential(tuple(-_vector(self.E)))

    def vector_potential(self):
        return ZERO_VECTOR_POTENTIAL


@dataclass(frozen=True)
class UniformMagnetic(FieldConfig):
    """Uniform B with A = B x r / 2."""

    B: tuple[float, float, float]
    kind = "uniform_B"

    def fields(self, r, t):
        return np.zeros(3), _vector(self.B)

    def scalar_potential(self):
        return ZERO_POTENTIAL

    def vector_potential(self):
        return SymmetricGaugePotential(tuple(_vector(self.B)))


@dataclass(frozen=True)
class CrossedFields(FieldConfig):
    """Uniform E and B together."""

    E: tuple[float, float, float]
    B: tuple[float, float, float]
    kind = "crossed"

    def fields(self, r, t):
        return _vector(self.E), _vector(self.B)

    def scalar_potential(self):
        return LinearPotential(tuple(-_vector(self.E)))

    def vector_potential(self):
        return SymmetricGaugePotential(tuple(_vector(self.B)))


@dataclass(frozen=True)
class RampElectric(FieldConfig):
    """E = E0 t with Phi = -t E0 . r."""

    E0: tuple[float, float, float]
    kind = "ramp_E"

    def fields(self, r, t):
        return t * _vector(self.E0), np.zeros(3)

    def scalar_potential(self):
        return RampPotential(tuple(-_vector(self.E0)))

    def vector_potential(self):
        return ZERO_VECTOR_POTENTIAL


@dataclass(frozen=True)
class CallableField(FieldConfig):
    """User field ``func(r, t) -> (E, B)``."""

    func: Callable[[np.ndarray, float], tuple]
    kind = "callable"

    def fields(self, r, t):
        E, B = self.func(np.asarray(r, dtype=float), t)
        return _vector(E), _vector(B)
