"""Run a validated scenario and summarise it as a RunReport."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from hamflow.scenarios.scenario import Scenario, ScenarioMode
from hamflow.tools.dynamics import (
    DeviationReport,
    FlowMode,
    State3D,
    compare_flows,
    compare_routes,
    integrate,
)
from hamflow.tools.export import write_expectations_csv, write_trajectory_csv
from hamflow.tools.geometry import on_shell_init
from hamflow.tools.hamiltonians import ChargedCanonical, ModifiedHamiltonian, Relativistic
from hamflow.tools.quantum_check import EhrenfestReport, ehrenfest_check, evolve_packet, gaussian_packet

logger = logging.getLogger(__name__)


@dataclass
class RunReport:
    """Summary of one scenario run, printed as key-value lines."""

    mode: str
    model: str
    constants: dict
    output: Path
    rows: int
    max_constraint: Optional[float] = None
    final_energy: Optional[float] = None
    deviation: Optional[DeviationReport] = None
    ehrenfest: Optional[EhrenfestReport] = None
    wall_clock: float = 0.0
    failed_checks: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed_checks

    def lines(self) -> list[str]:
        lines = [f"{key} = {value!r}" for key, value in self.constants.items()]
        lines += [f"mode = {self.mode}", f"model = {self.model}", f"output = {self.output}", f"rows = {self.rows}"]
        if self.max_constraint is not None:
            lines.append(f"max_constraint = {self.max_constraint!r}")
        if self.final_energy is not None:
            lines.append(f"final_energy = {self.final_energy!r}")
        if self.deviation is not None:
            lines += [
                f"max_position_deviation = {self.deviation.max_position!r}",
                f"relative_position_deviation = {self.deviation.relative_position!r}",
                f"max_momentum_deviation = {self.deviation.max_momentum!r}",
                f"max_energy_deviation = {self.deviation.max_energy!r}",
            ]
        if self.ehrenfest is not None:
            lines += [
                f"ehrenfest_velocity = {self.ehrenfest.velocity!r}",
                f"ehrenfest_force = {self.ehrenfest.force!r}",
                f"ehrenfest_power = {self.ehrenfest.power!r}",
            ]
        lines.append(f"checks = {'passed' if self.ok else 'failed'}")
        lines += [f"failed_check = {message}" for message in self.failed_checks]
        lines.append(f"wall_clock = {self.wall_clock:.3f}")
        return lines


def _trajectory_run(scenario: Scenario):
    spec = scenario.model
    field = scenario.build_field()
    model = spec.build(field)
    initial = scenario.initial
    if scenario.mode is ScenarioMode.REFERENCE_3D:
        state = State3D.from_model(initial.t0, initial.position, initial.momentum, model)
        return integrate(state, ModifiedHamiltonian(model, spec.c), scenario.dt, scenario.n_steps, FlowMode.REFERENCE_3D)
    mh = ModifiedHamiltonian(model, spec.c)
    point = on_shell_init(initial.t0, initial.position, initial.momentum, model, spec.c)
    return integrate(point, mh, scenario.dt, scenario.n_steps, FlowMode(scenario.mode.value), field, spec.charge)


def _compare_run(scenario: Scenario):
    spec = scenario.model
    initial = scenario.initial
    if scenario.route == "gauge":
        field = scenario.build_field()
        r0 = np.asarray(initial.position, dtype=float)
        pi0 = np.asarray(initial.momentum, dtype=float)
        canonical_model = ChargedCanonical(
            spec.mass, spec.charge, spec.c, field.scalar_potential(), field.vector_potential()
        )
        p0 = pi0 + (spec.charge / spec.c) * field.vector_potential().value(r0, initial.t0)
        kinetic_model = Relativistic(spec.mass, spec.c)
        canonical = integrate(
            on_shell_init(initial.t0, r0, p0, canonical_model, spec.c),
            ModifiedHamiltonian(canonical_model, spec.c),
            scenario.dt,
            scenario.n_steps,
        )
        gauge = integrate(
            on_shell_init(initial.t0, r0, pi0, kinetic_model, spec.c),
            ModifiedHamiltonian(kinetic_model, spec.c),
            scenario.dt,
            scenario.n_steps,
            FlowMode.GAUGE_4D,
            field,
            spec.charge,
        )
        return canonical, compare_routes(canonical, gauge, field, spec.charge)

    model = spec.build(scenario.build_field())
    mh = ModifiedHamiltonian(model, spec.c)
    traj4d = integrate(
        on_shell_init(initial.t0, initial.position, initial.momentum, model, spec.c), mh, scenario.dt, scenario.n_steps
    )
    traj3d = integrate(
        State3D.from_model(initial.t0, initial.position, initial.momentum, model),
        mh,
        scenario.dt,
        scenario.n_steps,
        FlowMode.REFERENCE_3D,
    )
    return traj4d, compare_flows(traj4d, traj3d)


def run(scenario: Scenario, output_dir=None) -> RunReport:
    """
    Run a scenario and write its CSV.

    :param output_dir: Directory that a relative ``scenario.output`` is
        resolved against; defaults to the working directory.
    :raises HamflowError: On integration or domain failures.
    :raises OSError: If the CSV cannot be written.
    """
    started = time.perf_counter()
    output = Path(scenario.output)
    if output_dir is not None and not output.is_absolute():
        output = Path(output_dir) / output
    checks = scenario.checks
    spec = scenario.model
    report = RunReport(scenario.mode.value, spec.name, spec.constants(), output, 0)
    logger.info("Running %s scenario with model %s", scenario.mode.value, spec.name)

    if scenario.mode is ScenarioMode.QUANTUM:
        packet, grid = scenario.packet, scenario.grid
        psi = gaussian_packet(packet.x0, packet.k0, packet.sigma, grid.n_points, grid.x_min, grid.x_max)
        _, records = evolve_packet(
            psi, spec.build_potential(), scenario.dt, scenario.n_steps, spec.mass, spec.hbar, grid.record_every
        )
        write_expectations_csv(records, output)
        report.rows = len(records)
        report.final_energy = records[-1].energy_mean
        if len(records) >= 3:
            report.ehrenfest = ehrenfest_check(records, scenario.dt * grid.record_every, spec.mass)
            if checks.max_ehrenfest is not None and report.ehrenfest.max_residual() > checks.max_ehrenfest:
                report.failed_checks.append(
                    f"Ehrenfest residual {report.ehrenfest.max_residual():.3e} exceeds {checks.max_ehrenfest:.3e}"
                )
    else:
        if scenario.mode is ScenarioMode.COMPARE:
            trajectory, report.deviation = _compare_run(scenario)
            if checks.max_deviation is not None and report.deviation.max_position > checks.max_deviation:
                report.failed_checks.append(
                    f"Position deviation {report.deviation.max_position:.3e} exceeds {checks.max_deviation:.3e}"
                )
        else:
            trajectory = _trajectory_run(scenario)
        write_trajectory_csv(trajectory, output)
        report.rows = len(trajectory)
        report.max_constraint = trajectory.max_constraint()
        report.final_energy = trajectory.final_energy()
        if checks.max_constraint is not None and report.max_constraint > checks.max_constraint:
            report.failed_checks.append(
                f"Constraint residual {report.max_constraint:.3e} exceeds {checks.max_constraint:.3e}"
            )

    report.wall_clock = time.perf_counter() - started
    for message in report.failed_checks:
        logger.warning(message)
    return report
