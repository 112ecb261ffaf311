"""
Fixed-step RK4 integration of the canonical flows.

Three flows share one RK4 kernel:

* ``canonical4d``: the 8-component flow generated by the modified
  Hamiltonian, rdot^a = dH/dp_a and pdot_a = -dH/dr^a.
* ``gauge4d``: the same flow for kinetic momentum with the extra force
  (e/c) F_ab rdot^b.
* ``reference3d``: ordinary Hamilton equations with the energy carried
  by quadrature of dH/dt.

Lab time t is the integration parameter. r0 and p_0 are integrated along
with the spatial block so that their drift can be used as a diagnostic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Iterable, Sequence, Union

import numpy as np
from scipy.stats import linregress

from hamflow.tools.em_field import FieldConfig, FieldTensor, force_term_array
from hamflow.tools.errors import IntegrationError, ModelDomainError, NumericalError
from hamflow.tools.geometry import PhasePoint
from hamflow.tools.hamiltonians import HamiltonianModel, ModifiedHamiltonian

logger = logging.getLogger(__name__)

Field = Union[FieldTensor, FieldConfig]


class FlowMode(str, Enum):
    CANONICAL_4D = "canonical4d"
    GAUGE_4D = "gauge4d"
    REFERENCE_3D = "reference3d"


@dataclass(frozen=True)
class Diagnostics:
    """
    Per-sample diagnostics.

    :param constraint: Value of the modified Hamiltonian (H - eps for 3D states).
    :param energy: Particle energy eps = -p_0 c.
    :param energy_rate_residual: d(eps)/dt sampled along the trajectory minus
        the rate predicted by the energy law.
    :param lockstep: r0 - c t.
    """

    constraint: float
    energy: float
    energy_rate_residual: float = 0.0
    lockstep: float = 0.0


@dataclass(frozen=True, eq=False)
class State3D:
    """Phase point of the ordinary 3D flow with the energy carried alongside."""

    t: float
    r: np.ndarray
    p: np.ndarray
    eps: float

    def __post_init__(self):
        r = np.array(self.r, dtype=float).reshape(3)
        p = np.array(self.p, dtype=float).reshape(3)
        if not (math.isfinite(self.t) and math.isfinite(self.eps) and np.all(np.isfinite(r)) and np.all(np.isfinite(p))):
            raise ValueError("State3D components must be finite")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_model(cls, t0: float, r, p, model: HamiltonianModel) -> State3D:
        """Start with eps equal to H at t0."""
        r = np.asarray(r, dtype=float)
        p = np.asarray(p, dtype=float)
        return cls(float(t0), r, p, model.eval(t0, r, p))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.r, self.p, [self.eps]])

    @classmethod
    def from_array(cls, t: float, values) -> State3D:
        return cls(float(t), values[0:3], values[3:6], float(values[6]))


State = Union[PhasePoint, State3D]


@dataclass(frozen=True)
class Sample:
    t: float
    state: State
    diagnostics: Diagnostics


@dataclass(eq=False)
class Trajectory:
    """
    Samples of one integrated flow, uniformly spaced by ``dt``.

    Phase components are stored row per sample: (r0, x, y, z, p0, px, py, pz)
    for the 4D modes and (x, y, z, px, py, pz, eps) for reference3d.
    """

    t: np.ndarray
    y: np.ndarray
    constraint: np.ndarray
    energy: np.ndarray
    energy_rate_residual: np.ndarray
    lockstep: np.ndarray
    dt: float
    model_id: str
    mode: FlowMode
    c: float = 1.0

    def __len__(self):
        return len(self.t)

    @cached_property
    def samples(self) -> list[Sample]:
        build = State3D.from_array if self.mode is FlowMode.REFERENCE_3D else PhasePoint.from_array
        return [
            Sample(float(t), build(float(t), y), Diagnostics(float(h), float(eps), float(res), float(lock)))
            for t, y, h, eps, res, lock in zip(
                self.t, self.y, self.constraint, self.energy, self.energy_rate_residual, self.lockstep
            )
        ]

    def times(self) -> np.ndarray:
        return self.t.copy()

    def states_array(self) -> np.ndarray:
        return self.y.copy()

    def positions(self) -> np.ndarray:
        return self.y[:, 0:3].copy() if self.mode is FlowMode.REFERENCE_3D else self.y[:, 1:4].copy()

    def momenta(self) -> np.ndarray:
        return self.y[:, 3:6].copy() if self.mode is FlowMode.REFERENCE_3D else self.y[:, 5:8].copy()

    def energies(self) -> np.ndarray:
        return self.energy.copy()

    def constraints(self) -> np.ndarray:
        return self.constraint.copy()

    def max_constraint(self) -> float:
        return float(np.max(np.abs(self.constraint)))

    def final_energy(self) -> float:
        return float(self.energy[-1])


@dataclass(frozen=True)
class DeviationReport:
    """Maximum deviations between two trajectories over all samples."""

    max_position: float
    max_momentum: float
    max_energy: float
    relative_position: float
    n_samples: int


@dataclass(frozen=True)
class ConvergenceResult:
    order: float
    intercept: float
    dts: tuple[float, ...] = field(default_factory=tuple)
    errors: tuple[float, ...] = field(default_factory=tuple)


def rk4_step(rhs: Callable[[float, np.ndarray], np.ndarray], t: float, y: np.ndarray, dt: float) -> np.ndarray:
    """One classic fourth-order Runge-Kutta step of y' = rhs(t, y)."""
    half = 0.5 * dt
    k1 = rhs(t, y)
    k2 = rhs(t + half, y + half * k1)
    k3 = rhs(t + half, y + half * k2)
    k4 = rhs(t + dt, y + dt * k3)
    # Dividing the weighted sum first keeps constant rates (r0' = c) exact.
    return y + dt * ((k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0)


def _canonical_rhs(mh: ModifiedHamiltonian):
    def rhs(t, y):
        d_r, d_p = mh.grad_array(t, y)
        return np.concatenate([d_p, -d_r])

    return rhs


def _gauge_rhs(mh: ModifiedHamiltonian, field: Field, e: float):
    def rhs(t, y):
        d_r, d_p = mh.grad_array(t, y)
        F = field.at(y[1:4], t).components
        # rdot^b is taken from the same stage point.
        return np.concatenate([d_p, -d_r + force_term_array(F, d_p, e, mh.c)])

    return rhs


def _reference_rhs(model: HamiltonianModel):
    def rhs(t, z):
        r, p = z[0:3], z[3:6]
        return np.concatenate([model.grad_p(t, r, p), -model.grad_r(t, r, p), [model.dt(t, r, p)]])

    return rhs


def _check_dt(dt: float):
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt must be positive, got {dt}")


def _advance(rhs, t: float, y: np.ndarray, dt: float, spatial: slice) -> np.ndarray:
    try:
        y_new = rk4_step(rhs, t, y, dt)
    except ModelDomainError as err:
        raise ModelDomainError(f"Step from t={t} at r={y[spatial].tolist()} failed: {err}") from err
    if not np.all(np.isfinite(y_new)):
        raise NumericalError(f"Step from t={t} at r={y[spatial].tolist()} produced non-finite values")
    return y_new


_SPATIAL_4D = slice(1, 4)
_SPATIAL_3D = slice(0, 3)


def step_canonical_4d(state: PhasePoint, dt: float, mh: ModifiedHamiltonian) -> PhasePoint:
    """Advance a phase point by one RK4 step of the 4D canonical equations."""
    _check_dt(dt)
    y = _advance(_canonical_rhs(mh), state.t, state.as_array(), dt, _SPATIAL_4D)
    return PhasePoint.from_array(state.t + dt, y)


def step_gauge_4d(state: PhasePoint, dt: float, mh: ModifiedHamiltonian, field: Field, e: float = 1.0) -> PhasePoint:
    """
    Advance a phase point with kinetic momentum by one RK4 step including
    the gauge force term. ``field`` is a FieldTensor or a FieldConfig
    evaluated at every stage point.
    """
    _check_dt(dt)
    y = _advance(_gauge_rhs(mh, field, e), state.t, state.as_array(), dt, _SPATIAL_4D)
    return PhasePoint.from_array(state.t + dt, y)


def step_canonical_3d(state: State3D, dt: float, model: HamiltonianModel) -> State3D:
    """Advance (r, p) by one RK4 step of Hamilton's equations and eps by quadrature of dH/dt."""
    _check_dt(dt)
    z = _advance(_reference_rhs(model), state.t, state.as_array(), dt, _SPATIAL_3D)
    return State3D.from_array(state.t + dt, z)


def constraint_residual(state: PhasePoint, mh: ModifiedHamiltonian) -> float:
    """Value of the modified Hamiltonian; zero on the constraint surface."""
    return mh.eval(state)


def _energy_rate(t: float, y: np.ndarray, mode: FlowMode, model: HamiltonianModel, c: float, field, e: float) -> float:
    """Rate of eps predicted by the energy law, including field work in gauge mode."""
    if mode is FlowMode.REFERENCE_3D:
        return float(model.dt(t, y[0:3], y[3:6]))
    r, p = y[1:4], y[5:8]
    rate = model.dt(t, r, p)
    if mode is FlowMode.GAUGE_4D and field is not None:
        rdot = np.concatenate([[c], model.grad_p(t, r, p)])
        rate -= c * force_term_array(field.at(r, t).components, rdot, e, c)[0]
    return float(rate)


def integrate(
    initial: State,
    hamiltonian: ModifiedHamiltonian | HamiltonianModel,
    dt: float,
    n_steps: int,
    mode: FlowMode | str = FlowMode.CANONICAL_4D,
    field: Field | None = None,
    e: float = 1.0,
) -> Trajectory:
    """
    Integrate ``n_steps`` fixed steps and return ``n_steps + 1`` samples.

    :param initial: PhasePoint for the 4D modes, State3D for reference3d.
    :param hamiltonian: ModifiedHamiltonian, or a bare model for reference3d.
    :param mode: canonical4d, gauge4d or reference3d.
    :param field: Field tensor or configuration, required for gauge4d.
    :param e: Charge used by the gauge force term.
    :raises IntegrationError: If a step fails; carries the step index.
    """
    mode = FlowMode(mode)
    if isinstance(n_steps, bool) or int(n_steps) != n_steps or n_steps < 1:
        raise ValueError(f"n_steps must be an integer >= 1, got {n_steps}")
    n_steps = int(n_steps)
    _check_dt(dt)
    if isinstance(hamiltonian, HamiltonianModel):
        if mode is not FlowMode.REFERENCE_3D:
            raise ValueError(f"Mode {mode.value} needs a ModifiedHamiltonian")
        hamiltonian = ModifiedHamiltonian(hamiltonian, getattr(hamiltonian, "c", 1.0))
    mh = hamiltonian
    model = mh.model

    if mode is FlowMode.REFERENCE_3D:
        if not isinstance(initial, State3D):
            raise ValueError("reference3d integration needs a State3D initial state")
        rhs, spatial = _reference_rhs(model), _SPATIAL_3D
    else:
        if not isinstance(initial, PhasePoint):
            raise ValueError(f"{mode.value} integration needs a PhasePoint initial state")
        if mode is FlowMode.GAUGE_4D:
            if field is None:
                raise ValueError("gauge4d integration needs a field")
            rhs = _gauge_rhs(mh, field, e)
        else:
            rhs = _canonical_rhs(mh)
        spatial = _SPATIAL_4D

    logger.info("Integrating %s with %s: dt=%g, n_steps=%d", mode.value, model.name, dt, n_steps)

    y0 = initial.as_array()
    ys = np.empty((n_steps + 1, len(y0)))
    ts = np.empty(n_steps + 1)
    ys[0] = y0
    t = ts[0] = initial.t
    for step in range(n_steps):
        try:
            ys[step + 1] = _advance(rhs, t, ys[step], dt, spatial)
        except (ModelDomainError, NumericalError) as err:
            logger.error("Step %d of %s failed: %s", step, mode.value, err)
            raise IntegrationError(step, err) from err
        t = ts[step + 1] = t + dt

    c = mh.c
    if mode is FlowMode.REFERENCE_3D:
        energy = ys[:, 6].copy()
        constraint = np.array([model.eval(t, y[0:3], y[3:6]) for t, y in zip(ts, ys)]) - energy
        lockstep = np.zeros(n_steps + 1)
    else:
        energy = -ys[:, 4] * c
        constraint = np.array([mh.eval_array(t, y) for t, y in zip(ts, ys)])
        lockstep = ys[:, 0] - c * ts
    expected = np.array([_energy_rate(t, y, mode, model, c, field, e) for t, y in zip(ts, ys)])
    sampled = np.gradient(energy, dt, edge_order=2 if n_steps >= 2 else 1)

    trajectory = Trajectory(ts, ys, constraint, energy, sampled - expected, lockstep, float(dt), model.name, mode, c)
    logger.info(
        "Finished %s: max |constraint|=%.3e, final energy=%.12g",
        mode.value,
        trajectory.max_constraint(),
        trajectory.final_energy(),
    )
    return trajectory


def _check_alignment(first: Trajectory, second: Trajectory):
    if len(first) != len(second):
        raise ValueError(f"Trajectories have different lengths: {len(first)} and {len(second)}")
    if not np.allclose(first.times(), second.times(), rtol=1e-12, atol=1e-12 * abs(first.dt)):
        raise ValueError("Trajectories are sampled at different times")


def _report(r_a, r_b, p_a, p_b, eps_a, eps_b) -> DeviationReport:
    max_position = float(np.max(np.linalg.norm(r_a - r_b, axis=1)))
    scale = float(np.max(np.linalg.norm(r_a, axis=1)))
    return DeviationReport(
        max_position=max_position,
        max_momentum=float(np.max(np.linalg.norm(p_a - p_b, axis=1))),
        max_energy=float(np.max(np.abs(eps_a - eps_b))),
        relative_position=max_position / scale if scale > 0.0 else max_position,
        n_samples=len(r_a),
    )


def compare_flows(traj4d: Trajectory, traj3d: Trajectory) -> DeviationReport:
    """Deviation of a canonical4d trajectory from the reference3d one."""
    if traj3d.mode is not FlowMode.REFERENCE_3D or traj4d.mode is FlowMode.REFERENCE_3D:
        raise ValueError("compare_flows needs a 4D trajectory and a reference3d trajectory")
    _check_alignment(traj4d, traj3d)
    return _report(
        traj4d.positions(),
        traj3d.positions(),
        traj4d.momenta(),
        traj3d.momenta(),
        traj4d.energies(),
        traj3d.energies(),
    )


def compare_routes(canonical: Trajectory, gauge: Trajectory, field: FieldConfig, e: float = 1.0) -> DeviationReport:
    """
    Compare a minimal-coupling canonical4d run with a gauge4d run of the same
    particle. Canonical momentum is converted with pi = p - (e/c) A and the
    canonical energy with eps - e Phi before comparing.
    """
    if canonical.mode is not FlowMode.CANONICAL_4D or gauge.mode is not FlowMode.GAUGE_4D:
        raise ValueError("compare_routes needs a canonical4d and a gauge4d trajectory")
    _check_alignment(canonical, gauge)
    c = canonical.c
    times = canonical.times()
    positions = canonical.positions()
    vector_potential = field.vector_potential()
    scalar_potential = field.scalar_potential()
    shifts = np.array([vector_potential.value(r, t) for r, t in zip(positions, times)])
    phis = np.array([float(scalar_potential.value(r, t)) for r, t in zip(positions, times)])
    return _report(
        positions,
        gauge.positions(),
        canonical.momenta() - (e / c) * shifts,
        gauge.momenta(),
        canonical.energies() - e * phis,
        gauge.energies(),
    )


def energy_law_residuals(
    trajectory: Trajectory,
    hamiltonian: ModifiedHamiltonian | HamiltonianModel,
    field: Field | None = None,
    e: float = 1.0,
) -> np.ndarray:
    """
    Midpoint residuals (eps_{k+1} - eps_k)/dt - (rate_k + rate_{k+1})/2 of the
    energy law, where rate is dH/dt plus field work for gauge trajectories.
    """
    model = hamiltonian.model if isinstance(hamiltonian, ModifiedHamiltonian) else hamiltonian
    gauge_field = field if trajectory.mode is FlowMode.GAUGE_4D else None
    mode, c = trajectory.mode, trajectory.c
    rates = np.array([_energy_rate(t, y, mode, model, c, gauge_field, e) for t, y in zip(trajectory.t, trajectory.y)])
    energies = trajectory.energies()
    return np.diff(energies) / trajectory.dt - 0.5 * (rates[1:] + rates[:-1])


def convergence_order(measure: Callable[[float], float], dts: Iterable[float]) -> ConvergenceResult:
    """
    Estimate the order p in error ~ C dt^p from runs at several step sizes.

    :param measure: Runs the problem at a step size and returns a positive error.
    :param dts: Step sizes, typically successive halvings.
    """
    dts = tuple(float(dt) for dt in dts)
    if len(dts) < 2:
        raise ValueError("At least two step sizes are needed")
    errors = tuple(float(measure(dt)) for dt in dts)
    if not all(err > 0.0 and math.isfinite(err) for err in errors):
        raise ValueError(f"Errors must be positive and finite to fit an order, got {errors}")
    fit = linregress(np.log(dts), np.log(errors))
    logger.info("Convergence fit over dt=%s: order %.3f", dts, fit.slope)
    return ConvergenceResult(float(fit.slope), float(fit.intercept), dts, errors)


def default_halvings(dt: float, count: int = 4) -> Sequence[float]:
    """dt, dt/2, dt/4, ... with ``count`` entries."""
    return [dt / 2**i for i in range(count)]
