"""CSV export of trajectories and expectation records."""

import csv
import logging
from pathlib import Path

from hamflow.tools.dynamics import FlowMode, Trajectory

logger = logging.getLogger(__name__)

TRAJECTORY_HEADER = ["t", "r0", "x", "y", "z", "pi0", "pix", "piy", "piz", "constraint", "energy"]
EXPECTATION_HEADER = ["t", "x_mean", "p_mean", "energy_mean", "dVdx_mean", "dVdt_mean"]


def _format(value: float) -> str:
    # repr gives the shortest string that round-trips the double.
    return repr(float(value))


def trajectory_rows(trajectory: Trajectory):
    """
    Rows in the trajectory CSV layout. Reference3d states have no r0/pi0;
    they are written as c t and -eps/c so every mode shares one header.
    """
    c = trajectory.c
    reference = trajectory.mode is FlowMode.REFERENCE_3D
    for t, y, constraint, energy in zip(trajectory.t, trajectory.y, trajectory.constraint, trajectory.energy):
        if reference:
            phase = [c * t, *y[0:3], -y[6] / c, *y[3:6]]
        else:
            phase = y.tolist()
        yield [float(t), *phase, float(constraint), float(energy)]


def write_trajectory_csv(trajectory: Trajectory, path) -> Path:
    """Write one row per sample with full float precision."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRAJECTORY_HEADER)
        for row in trajectory_rows(trajectory):
            writer.writerow([_format(v) for v in row])
    logger.info("Wrote %d trajectory rows to %s", len(trajectory), path)
    return path


def write_expectations_csv(records, path) -> Path:
    """Write one row per expectation record with full float precision."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(EXPECTATION_HEADER)
        for record in records:
            writer.writerow(
                [
                    _format(v)
                    for v in (
                        record.t,
                        record.x_mean,
                        record.p_mean,
                        record.energy_mean,
                        record.dV_dx_mean,
                        record.dV_dt_mean,
                    )
                ]
            )
    logger.info("Wrote %d expectation rows to %s", len(records), path)
    return path
