"""
Minkowski 4-vector algebra with a fixed (-+++) signature.

Index 0 is time everywhere: positions are contravariant ``r^a = (ct, x, y, z)``
and momenta are covariant ``p_a = (-E/c, px, py, pz)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from hamflow.tools.errors import ModelDomainError

SIGNATURE = np.array([-1.0, 1.0, 1.0, 1.0])
SIGNATURE.flags.writeable = False


class _FourVector:
    """Shared behaviour of the frozen 4-component value types."""

    def __post_init__(self):
        for field in fields(self):
            if not math.isfinite(getattr(self, field.name)):
                raise ValueError(f"{type(self).__name__}.{field.name} must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, field.name) for field in fields(self)], dtype=float)

    @classmethod
    def from_array(cls, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (4,):
            raise ValueError(f"Expected 4 components, got shape {values.shape}")
        return cls(*(float(v) for v in values))

    @property
    def spatial(self) -> np.ndarray:
        return self.as_array()[1:]


@dataclass(frozen=True)
class FourContravariantVector(_FourVector):
    """Upper-index components v^a."""

    v0: float
    v1: float
    v2: float
    v3: float


@dataclass(frozen=True)
class FourPosition(_FourVector):
    """Contravariant event coordinates with r0 = c t."""

    r0: float
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class FourCovector(_FourVector):
    """Lower-index components; for momenta c0 = p_0 = -E/c."""

    c0: float
    c1: float
    c2: float
    c3: float


@dataclass(frozen=True)
class Metric:
    """The Minkowski metric diag(-1, +1, +1, +1). Not configurable."""

    @property
    def signature(self) -> np.ndarray:
        return SIGNATURE

    def matrix(self) -> np.ndarray:
        return np.diag(SIGNATURE)

    def raise_index(self, v: FourCovector) -> FourContravariantVector:
        return FourContravariantVector.from_array(SIGNATURE * v.as_array())

    def lower_index(self, v: FourContravariantVector | FourPosition) -> FourCovector:
        return FourCovector.from_array(SIGNATURE * v.as_array())


MINKOWSKI = Metric()


def raise_index(v: FourCovector) -> FourContravariantVector:
    """Flip the sign of the time component of a covector."""
    return MINKOWSKI.raise_index(v)


def lower_index(v: FourContravariantVector | FourPosition) -> FourCovector:
    """Flip the sign of the time component of a contravariant vector."""
    return MINKOWSKI.lower_index(v)


def minkowski_contract(a: FourContravariantVector | FourPosition, b: FourCovector) -> float:
    """
    Contract an upper-index vector with a lower-index one.

    No metric factor enters since one index is already lowered.
    """
    return float(np.dot(a.as_array(), b.as_array()))


def minkowski_square(v: FourContravariantVector | FourPosition) -> float:
    """The invariant g_ab v^a v^b."""
    return minkowski_contract(v, lower_index(v))


def wave_covector(momentum: FourCovector, hbar: float = 1.0) -> FourCovector:
    """Wave 4-vector k_a = p_a / hbar of a packet with 4-momentum p_a."""
    return FourCovector.from_array(momentum.as_array() / hbar)


def momentum_covector(k: FourCovector, hbar: float = 1.0) -> FourCovector:
    """4-momentum p_a = hbar k_a of a packet with wave 4-vector k_a."""
    return FourCovector.from_array(hbar * k.as_array())


@dataclass(frozen=True)
class PhasePoint:
    """
    A point (r^a, p_a) of the 8-dimensional phase space, tagged with the lab
    time t used as the integration parameter.
    """

    t: float
    position: FourPosition
    momentum: FourCovector

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise ValueError("PhasePoint.t must be finite")

    @property
    def spatial_position(self) -> np.ndarray:
        return self.position.spatial

    @property
    def spatial_momentum(self) -> np.ndarray:
        return self.momentum.spatial

    def energy(self, c: float = 1.0) -> float:
        """Classical energy -p_0 c."""
        return -self.momentum.c0 * c

    def lockstep_error(self, c: float = 1.0) -> float:
        """r0 - c t, zero for a consistent point."""
        return self.position.r0 - c * self.t

    def as_array(self) -> np.ndarray:
        """The 8 phase components ordered (r0, x, y, z, p0, px, py, pz)."""
        return np.concatenate([self.position.as_array(), self.momentum.as_array()])

    @classmethod
    def from_array(cls, t: float, values) -> PhasePoint:
        values = np.asarray(values, dtype=float)
        if values.shape != (8,):
            raise ValueError(f"Expected 8 phase components, got shape {values.shape}")
        return cls(float(t), FourPosition.from_array(values[:4]), FourCovector.from_array(values[4:]))


def on_shell_init(t0: float, r, p, model, c: float = 1.0) -> PhasePoint:
    """
    Build a phase point on the constraint surface by setting p_0 = -H/c.

    :param t0: Lab time.
    :param r: Spatial position.
    :param p: Spatial momentum.
    :param model: A HamiltonianModel evaluated at (t0, r, p).
    :param c: Speed of light.
    :raises ModelDomainError: If the model cannot be evaluated at the point.
    """
    r = np.asarray(r, dtype=float)
    p = np.asarray(p, dtype=float)
    energy = model.eval(t0, r, p)
    if not math.isfinite(energy):
        raise ModelDomainError(f"{model.name} energy is not finite at t={t0}, r={r.tolist()}, p={p.tolist()}")
    position = FourPosition(c * t0, *(float(v) for v in r))
    momentum = FourCovector(-energy / c, *(float(v) for v in p))
    return PhasePoint(float(t0), position, momentum)
