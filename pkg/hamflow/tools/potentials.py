"""
Closed-form scalar potentials, vector potentials and refractive-index fields.

Built-in fields are vectorised: ``r`` may have shape ``(3,)`` or ``(..., 3)``
and results carry the leading shape. User callables are evaluated at single
points and differentiated with central finite differences.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Callable

import numpy as np

from hamflow.tools.errors import ModelDomainError
from hamflow.tools.finite_difference import fd_gradient


def _points(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape[-1:] != (3,):
        raise ValueError(f"Positions must have a trailing axis of length 3, got shape {r.shape}")
    return r


def _vector(values) -> np.ndarray:
    return np.asarray(values, dtype=float).reshape(3)


def cross_matrix(v) -> np.ndarray:
    """Matrix M with M @ w == cross(v, w)."""
    x, y, z = _vector(v)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


class ScalarField(abc.ABC):
    """A scalar function V(r, t) with spatial gradient and time derivative."""

    kind = "scalar"
    vectorised = True

    @abc.abstractmethod
    def value(self, r, t: float):
        """Field value at r and t."""

    def gradient(self, r, t: float) -> np.ndarray:
        r = _points(r)
        return fd_gradient(lambda x: float(self.value(x, t)), r)

    def time_derivative(self, r, t: float):
        r = _points(r)
        return fd_gradient(lambda s: float(self.value(r, s[0])), [t])[0]

    def __add__(self, other: ScalarField) -> SumPotential:
        return SumPotential((self, other))


@dataclass(frozen=True)
class SumPotential(ScalarField):
    """Pointwise sum of scalar fields."""

    terms: tuple[ScalarField, ...]
    kind = "sum"

    @property
    def vectorised(self):
        return all(term.vectorised for term in self.terms)

    def value(self, r, t):
        return sum(term.value(r, t) for term in self.terms)

    def gradient(self, r, t):
        return sum(term.gradient(r, t) for term in self.terms)

    def time_derivative(self, r, t):
        return sum(term.time_derivative(r, t) for term in self.terms)


@dataclass(frozen=True)
class UniformPotential(ScalarField):
    """V = C."""

    constant: float = 0.0
    kind = "uniform"

    def value(self, r, t):
        return np.full(_points(r).shape[:-1], self.constant)

    def gradient(self, r, t):
        return np.zeros_like(_points(r))

    def time_derivative(self, r, t):
        return np.zeros(_points(r).shape[:-1])


@dataclass(frozen=True)
class LinearPotential(ScalarField):
    """V = g . r, a uniform force -g."""

    gradient_vector: tuple[float, float, float]
    kind = "linear"

    def value(self, r, t):
        return _points(r) @ _vector(self.gradient_vector)

    def gradient(self, r, t):
        return np.broadcast_to(_vector(self.gradient_vector), _points(r).shape).copy()

    def time_derivative(self, r, t):
        return np.zeros(_points(r).shape[:-1])


@dataclass(frozen=True)
class HarmonicPotential(ScalarField):
    """V = k |r - r_c|^2 / 2."""

    stiffness: float = 1.0
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    kind = "harmonic"

    def value(self, r, t):
        d = _points(r) - _vector(self.center)
        return 0.5 * self.stiffness * np.sum(d * d, axis=-1)

    def gradient(self, r, t):
        return self.stiffness * (_points(r) - _vector(self.center))

    def time_derivative(self, r, t):
        return np.zeros(_points(r).shape[:-1])


@dataclass(frozen=True)
class RampPotential(ScalarField):
    """V = t g . r, a force growing linearly in time."""

    gradient_vector: tuple[float, float, float]
    kind = "ramp"

    def value(self, r, t):
        return t * (_points(r) @ _vector(self.gradient_vector))

    def gradient(self, r, t):
        return t * np.broadcast_to(_vector(self.gradient_vector), _points(r).shape)

    def time_derivative(self, r, t):
        return _points(r) @ _vector(self.gradient_vector)


@dataclass(frozen=True)
class SinePotential(ScalarField):
    """V = sin(omega t) g . r, a harmonically driven uniform force."""

    gradient_vector: tuple[float, float, float]
    omega: float = 1.0
    kind = "sine"

    def value(self, r, t):
        return np.sin(self.omega * t) * (_points(r) @ _vector(self.gradient_vector))

    def gradient(self, r, t):
        return np.sin(self.omega * t) * np.broadcast_to(_vector(self.gradient_vector), _points(r).shape)

    def time_derivative(self, r, t):
        return self.omega * np.cos(self.omega * t) * (_points(r) @ _vector(self.gradient_vector))


@dataclass(frozen=True)
class CallablePotential(ScalarField):
    """User potential ``func(r, t)`` evaluated at single points."""

    func: Callable[[np.ndarray, float], float]
    kind = "callable"
    vectorised = False

    def value(self, r, t):
        return float(self.func(_points(r), t))


class IndexField(ScalarField):
    """A refractive index n(r, t); must stay positive."""

    kind = "index"

    def checked_value(self, r, t) -> float:
        n = float(self.value(r, t))
        if not n > 0.0:
            raise ModelDomainError(f"Refractive index must be positive, got n={n} at r={np.asarray(r).tolist()}, t={t}")
        return n


@dataclass(frozen=True)
class UniformIndex(IndexField):
    """n = n0."""

    n0: float = 1.0
    kind = "uniform"

    def value(self, r, t):
        return np.full(_points(r).shape[:-1], self.n0)

    def gradient(self, r, t):
        return np.zeros_like(_points(r))

    def time_derivative(self, r, t):
        return np.zeros(_points(r).shape[:-1])


@dataclass(frozen=True)
class LinearGradientIndex(IndexField):
    """n = n0 (1 + alpha u . r) for a unit direction u."""

    n0: float = 1.0
    alpha: float = 0.0
    direction: tuple[float, float, float] = (1.0, 0.0, 0.0)
    kind = "linear_gradient"

    def _unit(self) -> np.ndarray:
        u = _vector(self.direction)
        return u / np.linalg.norm(u)

    def value(self, r, t):
        return self.n0 * (1.0 + self.alpha * (_points(r) @ self._unit()))

    def gradient(self, r, t):
        return np.broadcast_to(self.n0 * self.alpha * self._unit(), _points(r).shape).copy()

    def time_derivative(self, r, t):
        return np.zeros(_points(r).shape[:-1])


@dataclass(frozen=True)
class CallableIndex(IndexField):
    """User index ``func(r, t)`` evaluated at single points."""

    func: Callable[[np.ndarray, float], float]
    kind = "callable"
    vectorised = False

    def value(self, r, t):
        return float(self.func(_points(r), t))


class VectorField(abc.ABC):
    """A vector potential A(r, t) with Jacobian J[i, j] = dA_i/dr_j."""

    kind = "vector"

    @abc.abstractmethod
    def value(self, r, t: float) -> np.ndarray:
        """Field value at r and t."""

    def jacobian(self, r, t: float) -> np.ndarray:
        r = _points(r)
        return np.stack([fd_gradient(lambda x, i=i: float(self.value(x, t)[i]), r) for i in range(3)])

    def time_derivative(self, r, t: float) -> np.ndarray:
        r = _points(r)
        return np.array([fd_gradient(lambda s, i=i: float(self.value(r, s[0])[i]), [t])[0] for i in range(3)])


@dataclass(frozen=True)
class ZeroVectorPotential(VectorField):
    kind = "zero"

    def value(self, r, t):
        return np.zeros_like(_points(r))

    def jacobian(self, r, t):
        return np.zeros(_points(r).shape[:-1] + (3, 3))

    def time_derivative(self, r, t):
        return np.zeros_like(_points(r))


@dataclass(frozen=True)
class SymmetricGaugePotential(VectorField):
    """A = B x r / 2, whose curl is the uniform field B."""

    field_vector: tuple[float, float, float] = (0.0, 0.0, 1.0)
    kind = "symmetric_gauge"

    def value(self, r, t):
        return 0.5 * np.cross(_vector(self.field_vector), _points(r))

    def jacobian(self, r, t):
        return np.broadcast_to(0.5 * cross_matrix(self.field_vector), _points(r).shape[:-1] + (3, 3)).copy()

    def time_derivative(self, r, t):
        return np.zeros_like(_points(r))


@dataclass(frozen=True)
class CallableVectorPotential(VectorField):
    """User vector potential ``func(r, t) -> 3-vector`` at single points."""

    func: Callable[[np.ndarray, float], np.ndarray]
    kind = "callable"

    def value(self, r, t):
        return _vector(self.func(_points(r), t))


ZERO_POTENTIAL = UniformPotential(0.0)
ZERO_VECTOR_POTENTIAL = ZeroVectorPotential()
