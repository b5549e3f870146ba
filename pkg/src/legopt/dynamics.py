"""Closed-form Lagrangian dynamics of the three-joint leg.

Energies are written segment by segment. The coxa turns with the root
yaw only. The femur and tibia centers of mass sweep circles about the yaw
axis and move in the leg plane with the hip and knee. Rod inertias
enter only through the pitch rates ``qd2`` (femur) and ``qd3`` (tibia).
Torques follow from ``tau = d/dt dEk/dqd - dEk/dq + dEp/dq``, expanded
analytically in :mod:`legopt._kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import AlignmentError, EmptyInputError
from .geometry import LegGeometry, MaterialParams, leg_properties


@dataclass(frozen=True)
class DynamicsParams:
    """Per-segment arrays (coxa, femur, tibia) plus gravity and base height."""

    lengths: np.ndarray
    masses: np.ndarray
    com_offsets: np.ndarray
    inertias: np.ndarray
    gravity: float = 9.8066
    base_height: float = 0.0

    def __post_init__(self):
        for name in ("lengths", "masses", "com_offsets", "inertias"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (3,):
                raise ValueError(f"{name} must have 3 entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_geometry(
        cls,
        geom: LegGeometry,
        mat: MaterialParams | None = None,
        inertia: str = "com",
        allow_degenerate: bool = False,
    ) -> "DynamicsParams":
        mat = mat or MaterialParams()
        props = leg_properties(geom, mat, inertia, allow_degenerate)
        return cls(
            lengths=props.lengths,
            masses=props.masses,
            com_offsets=props.com_offsets,
            inertias=props.inertias,
            gravity=mat.gravity,
            base_height=mat.base_height,
        )

    def scaled(self, factor: float) -> "DynamicsParams":
        """Same leg with every mass and inertia multiplied by ``factor``."""
        return DynamicsParams(
            self.lengths, self.masses * factor, self.com_offsets, self.inertias * factor,
            self.gravity, self.base_height,
        )

    def without_gravity(self) -> "DynamicsParams":
        return DynamicsParams(
            self.lengths, self.masses, self.com_offsets, self.inertias, 0.0, self.base_height
        )

    def kernel_args(self):
        return self.lengths, self.masses, self.com_offsets, self.inertias, self.gravity


@dataclass(frozen=True)
class JointState:
    """Joint angles, rates and accelerations; each ``(3,)`` or ``(n, 3)``."""

    theta: np.ndarray
    omega: np.ndarray
    alpha: np.ndarray

    @classmethod
    def static(cls, theta) -> "JointState":
        th = np.asarray(theta, dtype=float)
        return cls(th, np.zeros_like(th), np.zeros_like(th))


def kinetic_energy(p: DynamicsParams, theta, omega):
    """Total kinetic energy for angles/rates of shape ``(3,)`` or ``(n, 3)``."""
    th = np.asarray(theta, dtype=float)
    w = np.asarray(omega, dtype=float)
    l1, l2, _ = p.lengths
    m1, m2, m3 = p.masses
    a1, a2, a3 = p.com_offsets
    I1, I2, I3 = p.inertias
    q2, q3 = th[..., 1], th[..., 2]
    w1, w2, w3 = w[..., 0], w[..., 1], w[..., 2]

    coxa = 0.5 * m1 * a1**2 * w1**2 + 0.5 * I1 * w1**2
    femur = 0.5 * m2 * ((l1 + a2 * np.cos(q2)) ** 2 * w1**2 + a2**2 * w2**2) + 0.5 * I2 * w2**2
    tibia = 0.5 * m3 * (
        (l1 + l2 * np.cos(q2) + a3 * np.cos(q3 - q2)) ** 2 * w1**2
        + 2 * l2 * a3 * w2 * (w2 - w3) * np.cos(q3)
        + l2**2 * w2**2
        + a3**2 * (w2 - w3) ** 2
    ) + 0.5 * I3 * w3**2
    return coxa + femur + tibia


def potential_energy(p: DynamicsParams, theta):
    """Total gravitational potential energy relative to the zero plane."""
    th = np.asarray(theta, dtype=float)
    l2 = p.lengths[1]
    m1, m2, m3 = p.masses
    a3 = p.com_offsets[2]
    a2 = p.com_offsets[1]
    g, h = p.gravity, p.base_height
    q2, q3 = th[..., 1], th[..., 2]
    return (
        m1 * g * h
        + m2 * g * (h + a2 * np.sin(q2))
        + m3 * g * (h + l2 * np.sin(q2) - a3 * np.sin(q3 - q2))
    )


def inverse_dynamics(p: DynamicsParams, theta, omega, alpha) -> np.ndarray:
    """Joint torques ``(tau1, tau2, tau3)`` in N*m; broadcasts over leading axes."""
    return _kernels.inverse_dynamics_batch(*p.kernel_args(), theta, omega, alpha)


def mass_matrix(p: DynamicsParams, theta) -> np.ndarray:
    """Mass matrix probed from :func:`inverse_dynamics` with unit accelerations."""
    pg = p.without_gravity()
    th = np.broadcast_to(np.asarray(theta, dtype=float), (4, 3))
    acc = np.vstack([np.zeros(3), np.eye(3)])
    tau = inverse_dynamics(pg, th, np.zeros((4, 3)), acc)
    return (tau[1:] - tau[0]).T


def bias_torques(p: DynamicsParams, theta, omega) -> np.ndarray:
    """Coriolis, centrifugal and gravity torques (inverse dynamics at zero acceleration)."""
    om = np.asarray(omega, dtype=float)
    return inverse_dynamics(p, theta, om, np.zeros_like(om))


@dataclass(frozen=True)
class TorqueTrace:
    """Per-sample torques and joint powers aligned with a trajectory."""

    time: np.ndarray
    torque: np.ndarray
    power: np.ndarray

    def __len__(self) -> int:
        return len(self.time)


def torque_trace(p: DynamicsParams, traj) -> TorqueTrace:
    if len(traj.time) == 0:
        raise EmptyInputError("trajectory has no samples")
    if not (traj.theta.shape == traj.omega.shape == traj.alpha.shape == (len(traj.time), 3)):
        raise AlignmentError("trajectory arrays are misaligned")
    tau = inverse_dynamics(p, traj.theta, traj.omega, traj.alpha)
    return TorqueTrace(time=np.array(traj.time), torque=tau, power=tau * traj.omega)
