"""Structural optimization of a three-joint hexapod leg.

Quintic swing planning, closed-form Lagrangian dynamics with a
finite-difference oracle, energy/torque metrics and a genetic algorithm over
segment dimensions.
"""

from ._accel import BACKEND
from .config import RunConfig
from .dynamics import DynamicsParams, inverse_dynamics, kinetic_energy, mass_matrix, potential_energy, torque_trace
from .errors import LegOptError
from .geometry import (
    LegGeometry,
    MaterialParams,
    SegmentDims,
    calibrate_wall_thickness,
    initial_geometry,
    reference_optimized_geometry,
    segment_properties,
)
from .kinematics import forward_kinematics
from .metrics import MetricValues, evaluate
from .optimizer import GAConfig, LegProblem, fitness, run_ga
from .oracle import OracleConfig, check_power_balance, fd_torques, oracle_sweep
from .simcheck import forward_simulate, round_trip
from .trajectory import Trajectory, plan_swing, solve_quintic

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DynamicsParams",
    "GAConfig",
    "LegGeometry",
    "LegOptError",
    "LegProblem",
    "MaterialParams",
    "MetricValues",
    "OracleConfig",
    "RunConfig",
    "SegmentDims",
    "Trajectory",
    "calibrate_wall_thickness",
    "check_power_balance",
    "evaluate",
    "fd_torques",
    "fitness",
    "forward_kinematics",
    "forward_simulate",
    "initial_geometry",
    "inverse_dynamics",
    "kinetic_energy",
    "mass_matrix",
    "oracle_sweep",
    "plan_swing",
    "potential_energy",
    "reference_optimized_geometry",
    "round_trip",
    "run_ga",
    "segment_properties",
    "solve_quintic",
    "torque_trace",
]
