"""Trajectory-level evaluation metrics for a leg design."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import DynamicsParams, TorqueTrace, torque_trace
from .errors import AlignmentError, EmptyInputError
from .geometry import LegGeometry, MaterialParams, leg_properties
from .kinematics import max_reach

ENERGY_MODES = ("absolute", "signed")


@dataclass(frozen=True)
class MetricValues:
    """Peak torques and energies per joint, reach, and stiffness per segment."""

    peak_torque: np.ndarray
    energy: np.ndarray
    reach: float
    stiffness: np.ndarray
    masses: np.ndarray

    def to_dict(self) -> dict:
        return {
            "peak_torque": [float(v) for v in self.peak_torque],
            "energy": [float(v) for v in self.energy],
            "reach": float(self.reach),
            "stiffness": [float(v) for v in self.stiffness],
            "masses": [float(v) for v in self.masses],
        }


# The baseline is just the metric set of the initial design, frozen.
Baseline = MetricValues


def peak_torque(trace: TorqueTrace) -> np.ndarray:
    if len(trace.time) == 0:
        raise EmptyInputError("torque trace has no samples")
    return np.max(np.abs(trace.torque), axis=0)


def joint_energy(trace: TorqueTrace, traj, mode: str = "absolute") -> np.ndarray:
    """Per-joint energy ``sum_j P_j * (t_j - t_{j-1})`` over samples ``j >= 1``.

    ``mode="absolute"`` integrates ``|P|``; ``mode="signed"`` integrates ``P``.
    """
    if mode not in ENERGY_MODES:
        raise ValueError(f"energy mode must be one of {ENERGY_MODES}, got {mode!r}")
    if len(trace.time) != len(traj.time) or not np.array_equal(trace.time, traj.time):
        raise AlignmentError("torque trace and trajectory time grids differ")
    if len(trace.time) == 0:
        raise EmptyInputError("torque trace has no samples")
    power = trace.torque[1:] * traj.omega[1:]
    if mode == "absolute":
        power = np.abs(power)
    dt = np.diff(np.asarray(traj.time, dtype=float))
    return power.T @ dt


def evaluate(
    geom: LegGeometry,
    traj,
    mat: MaterialParams | None = None,
    energy_mode: str = "absolute",
    inertia: str = "com",
) -> MetricValues:
    """Run properties -> torques -> metrics for one design on a fixed joint trajectory."""
    mat = mat or MaterialParams()
    props = leg_properties(geom, mat, inertia)
    params = DynamicsParams(
        props.lengths, props.masses, props.com_offsets, props.inertias, mat.gravity, mat.base_height
    )
    trace = torque_trace(params, traj)
    return MetricValues(
        peak_torque=peak_torque(trace),
        energy=joint_energy(trace, traj, energy_mode),
        reach=max_reach(geom, traj),
        stiffness=props.stiffness,
        masses=props.masses,
    )


def reduction_percent(before, after) -> np.ndarray:
    before = np.asarray(before, dtype=float)
    return 100.0 * (before - np.asarray(after, dtype=float)) / before
