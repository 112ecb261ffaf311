"""
One-dimensional grid Schrodinger solver used to check the quantum statements
of the formalism at desk scale: canonical commutators, the constraint form
of the Schrodinger equation, and the Ehrenfest and energy laws.

The kinetic operator is the fourth-order five-point Laplacian, so the
Crank-Nicolson matrix is pentadiagonal and the discrete commutator of the
Laplacian with x is exactly twice the fourth-order first derivative.
Boundaries are Dirichlet: the wavefunction is zero just outside the grid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from hamflow.tools.errors import GridResolutionError, NumericalError
from hamflow.tools.potentials import ScalarField

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 2048
DEFAULT_X_MIN = -40.0
DEFAULT_X_MAX = 40.0
EDGE_FRACTION = 0.05
EDGE_TOLERANCE = 1e-8
DERIVATIVE_METHODS = ("fd4", "spectral")


@dataclass(frozen=True, eq=False)
class GridWavefunction:
    """Complex samples of psi on x_j = x0 + j dx at time t."""

    values: np.ndarray
    x0: float
    dx: float
    t: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.ndim != 1 or values.size < 5:
            raise ValueError("A wavefunction needs a 1D grid of at least 5 points")
        if not self.dx > 0.0:
            raise ValueError("Grid spacing must be positive")
        object.__setattr__(self, "values", values)

    @property
    def n_points(self) -> int:
        return self.values.size

    @property
    def grid(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n_points)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.dx)

    def check_resolved(self, edge_fraction: float = EDGE_FRACTION, tolerance: float = EDGE_TOLERANCE):
        """
        :raises GridResolutionError: If |psi| reaches ``tolerance`` within the
            outer ``edge_fraction`` of the grid on either side.
        """
        width = max(1, int(math.ceil(edge_fraction * self.n_points)))
        edges = np.concatenate([self.values[:width], self.values[-width:]])
        peak = float(np.max(np.abs(edges)))
        if peak >= tolerance:
            raise GridResolutionError(
                f"Wave packet reaches the grid edges at t={self.t}: max |psi|={peak:.3e} in the outer {edge_fraction:.0%}"
            )


def gaussian_packet(
    x0: float,
    k0: float,
    sigma: float,
    n_points: int = DEFAULT_POINTS,
    x_min: float = DEFAULT_X_MIN,
    x_max: float = DEFAULT_X_MAX,
    t: float = 0.0,
) -> GridWavefunction:
    """
    Normalised Gaussian packet exp(-(x - x0)^2 / (4 sigma^2) + i k0 x).

    ``sigma`` is the standard deviation of |psi|^2.
    """
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    if not (n_points >= 5 and x_max > x_min):
        raise ValueError("Grid needs at least 5 points and x_max > x_min")
    x = np.linspace(x_min, x_max, n_points)
    dx = (x_max - x_min) / (n_points - 1)
    values = np.exp(-((x - x0) ** 2) / (4.0 * sigma**2) + 1j * k0 * x)
    values /= math.sqrt(float(np.sum(np.abs(values) ** 2) * dx))
    return GridWavefunction(values, float(x_min), dx, t)


def derivative(values: np.ndarray, dx: float, method: str = "fd4") -> np.ndarray:
    """
    First derivative of grid samples.

    ``fd4`` is the fourth-order central difference with zero values outside
    the grid; ``spectral`` differentiates through the FFT.
    """
    if method == "fd4":
        p = np.pad(values, 2)
        return (8.0 * (p[3:-1] - p[1:-3]) - (p[4:] - p[:-4])) / (12.0 * dx)
    if method == "spectral":
        k = 2.0 * np.pi * np.fft.fftfreq(values.size, dx)
        return np.fft.ifft(1j * k * np.fft.fft(values))
    raise ValueError(f"Unknown derivative method '{method}', expected one of {DERIVATIVE_METHODS}")


def laplacian(values: np.ndarray, dx: float) -> np.ndarray:
    """Fourth-order five-point second derivative with Dirichlet padding."""
    p = np.pad(values, 2)
    return (-p[4:] + 16.0 * p[3:-1] - 30.0 * p[2:-2] + 16.0 * p[1:-3] - p[:-4]) / (12.0 * dx * dx)


def _grid_points(psi: GridWavefunction) -> np.ndarray:
    points = np.zeros((psi.n_points, 3))
    points[:, 0] = psi.grid
    return points


def _on_grid(method, potential: ScalarField, points: np.ndarray, t: float) -> np.ndarray:
    if potential.vectorised:
        return np.asarray(method(points, t), dtype=float)
    return np.array([method(point, t) for point in points], dtype=float)


def potential_on_grid(V: ScalarField, psi: GridWavefunction, t: float) -> np.ndarray:
    values = _on_grid(V.value, V, _grid_points(psi), t)
    values = np.broadcast_to(values, (psi.n_points,))
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"Potential is not finite on the grid at t={t}")
    return values


def apply_hamiltonian(values: np.ndarray, potential: np.ndarray, dx: float, m: float = 1.0, hbar: float = 1.0):
    """H psi = -hbar^2/(2m) psi'' + V psi."""
    return -(hbar * hbar) / (2.0 * m) * laplacian(values, dx) + potential * values


def evolve_cn(psi: GridWavefunction, V: ScalarField, dt: float, m: float = 1.0, hbar: float = 1.0) -> GridWavefunction:
    """
    One Crank-Nicolson step (1 + i dt H/2hbar) psi' = (1 - i dt H/2hbar) psi
    with the potential taken at t + dt/2.

    :raises GridResolutionError: If the packet touches the grid edges.
    :raises NumericalError: If the banded solve fails.
    """
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt must be positive, got {dt}")
    psi.check_resolved()
    potential = potential_on_grid(V, psi, psi.t + 0.5 * dt)

    tau = 0.5 * dt / hbar
    kinetic = -(hbar * hbar) / (2.0 * m) / (12.0 * psi.dx * psi.dx)
    n = psi.n_points
    bands = np.empty((5, n), dtype=complex)
    bands[0, :] = 1j * tau * (-kinetic)
    bands[1, :] = 1j * tau * (16.0 * kinetic)
    bands[2, :] = 1.0 + 1j * tau * (-30.0 * kinetic + potential)
    bands[3, :] = 1j * tau * (16.0 * kinetic)
    bands[4, :] = 1j * tau * (-kinetic)

    rhs = psi.values - 1j * tau * apply_hamiltonian(psi.values, potential, psi.dx, m, hbar)
    try:
        values = solve_banded((2, 2), bands, rhs)
    except (LinAlgError, ValueError) as err:
        raise NumericalError(f"Crank-Nicolson solve failed at t={psi.t}: {err}") from err
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"Crank-Nicolson step from t={psi.t} produced non-finite values")
    return GridWavefunction(values, psi.x0, psi.dx, psi.t + dt)


def _inner(psi: GridWavefunction, values: np.ndarray) -> complex:
    return complex(np.sum(np.conj(psi.values) * values) * psi.dx)


def expectation_position(psi: GridWavefunction) -> float:
    return float(np.sum(psi.grid * np.abs(psi.values) ** 2) * psi.dx)


def expectation_momentum(psi: GridWavefunction, hbar: float = 1.0, method: str = "fd4") -> float:
    """<p> with p = -i hbar d/dx."""
    return _inner(psi, -1j * hbar * derivative(psi.values, psi.dx, method)).real


def expectation_energy(
    psi: GridWavefunction, V: ScalarField, t: float | None = None, m: float = 1.0, hbar: float = 1.0
) -> float:
    """<H> at time ``t`` (defaults to the wavefunction's time)."""
    t = psi.t if t is None else t
    value = _inner(psi, apply_hamiltonian(psi.values, potential_on_grid(V, psi, t), psi.dx, m, hbar))
    if abs(value.imag) > 1e-10:
        raise NumericalError(f"<H> has imaginary part {value.imag:.3e}")
    return value.real


def commutator_expectation(psi: GridWavefunction, hbar: float = 1.0, method: str = "fd4") -> complex:
    """<psi| x p - p x |psi>, approximately i hbar."""
    x = psi.grid

    def p(values):
        return -1j * hbar * derivative(values, psi.dx, method)

    return _inner(psi, x * p(psi.values) - p(x * psi.values))


def expectation_force(psi: GridWavefunction, V: ScalarField, t: float | None = None) -> float:
    """<dV/dx>."""
    t = psi.t if t is None else t
    points = _grid_points(psi)
    gradient = _on_grid(V.gradient, V, points, t)
    return float(np.sum(np.abs(psi.values) ** 2 * np.broadcast_to(gradient, points.shape)[:, 0]) * psi.dx)


def expectation_power(psi: GridWavefunction, V: ScalarField, t: float | None = None) -> float:
    """<dV/dt>."""
    t = psi.t if t is None else t
    rate = np.broadcast_to(_on_grid(V.time_derivative, V, _grid_points(psi), t), (psi.n_points,))
    return float(np.sum(np.abs(psi.values) ** 2 * rate) * psi.dx)


@dataclass(frozen=True)
class ExpectationRecord:
    t: float
    x_mean: float
    p_mean: float
    energy_mean: float
    dV_dx_mean: float
    dV_dt_mean: float


def record_expectations(
    psi: GridWavefunction, V: ScalarField, m: float = 1.0, hbar: float = 1.0, method: str = "fd4"
) -> ExpectationRecord:
    return ExpectationRecord(
        t=psi.t,
        x_mean=expectation_position(psi),
        p_mean=expectation_momentum(psi, hbar, method),
        energy_mean=expectation_energy(psi, V, psi.t, m, hbar),
        dV_dx_mean=expectation_force(psi, V),
        dV_dt_mean=expectation_power(psi, V),
    )


def evolve_packet(
    psi: GridWavefunction,
    V: ScalarField,
    dt: float,
    n_steps: int,
    m: float = 1.0,
    hbar: float = 1.0,
    record_every: int = 1,
    method: str = "fd4",
) -> tuple[GridWavefunction, list[ExpectationRecord]]:
    """
    Evolve ``n_steps`` Crank-Nicolson steps, recording expectation values
    at the start and after every ``record_every`` steps.
    """
    if n_steps < 1 or record_every < 1:
        raise ValueError("n_steps and record_every must be >= 1")
    logger.info("Evolving packet on %d points: dt=%g, n_steps=%d", psi.n_points, dt, n_steps)
    records = [record_expectations(psi, V, m, hbar, method)]
    for step in range(1, n_steps + 1):
        psi = evolve_cn(psi, V, dt, m, hbar)
        if step % record_every == 0:
            records.append(record_expectations(psi, V, m, hbar, method))
    logger.info("Finished packet evolution at t=%g, norm drift %.3e", psi.t, abs(psi.norm() - 1.0))
    return psi, records


@dataclass(frozen=True)
class EhrenfestReport:
    """
    Maximum residuals of the expectation-value laws over interior records.

    :param velocity: d<x>/dt - <p>/m.
    :param force: d<p>/dt + <dV/dx>.
    :param power: d<H>/dt - <dV/dt>.
    :param power_scale: max |<dV/dt>|, for relative comparisons.
    """

    velocity: float
    force: float
    power: float
    power_scale: float

    def max_residual(self) -> float:
        return max(self.velocity, self.force, self.power)


def ehrenfest_check(records: list[ExpectationRecord], dt: float, m: float = 1.0) -> EhrenfestReport:
    """Compare central differences of recorded expectations with the Ehrenfest and energy laws."""
    if len(records) < 3:
        raise ValueError(f"At least 3 records are needed, got {len(records)}")
    times = np.array([record.t for record in records])
    if not np.allclose(np.diff(times), dt, rtol=1e-9, atol=0.0):
        raise ValueError(f"Records are not uniformly spaced by dt={dt}")

    def rate(values):
        values = np.asarray(values)
        return (values[2:] - values[:-2]) / (2.0 * dt)

    x = [record.x_mean for record in records]
    p = np.array([record.p_mean for record in records])
    energy = [record.energy_mean for record in records]
    force = np.array([record.dV_dx_mean for record in records])
    power = np.array([record.dV_dt_mean for record in records])
    return EhrenfestReport(
        velocity=float(np.max(np.abs(rate(x) - p[1:-1] / m))),
        force=float(np.max(np.abs(rate(p) + force[1:-1]))),
        power=float(np.max(np.abs(rate(energy) - power[1:-1]))),
        power_scale=float(np.max(np.abs(power))),
    )


def schrodinger_residual(
    psi_prev: GridWavefunction,
    psi_next: GridWavefunction,
    V: ScalarField,
    t_mid: float | None = None,
    dt: float | None = None,
    m: float = 1.0,
    hbar: float = 1.0,
) -> float:
    """
    L2 norm of i hbar (psi_next - psi_prev)/dt - H(t_mid) (psi_next + psi_prev)/2,
    the discrete form of (H + p_0 c) psi = 0.
    """
    dt = psi_next.t - psi_prev.t if dt is None else dt
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    t_mid = 0.5 * (psi_prev.t + psi_next.t) if t_mid is None else t_mid
    midpoint = 0.5 * (psi_next.values + psi_prev.values)
    potential = potential_on_grid(V, psi_prev, t_mid)
    residual = 1j * hbar * (psi_next.values - psi_prev.values) / dt - apply_hamiltonian(
        midpoint, potential, psi_prev.dx, m, hbar
    )
    return math.sqrt(float(np.sum(np.abs(residual) ** 2) * psi_prev.dx))
