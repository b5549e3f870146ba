"""Forward-dynamics verification and joint driving-power curves.

The forward model inverts the same inverse-dynamics function under test:
the mass matrix is probed with unit accelerations and the bias torques are
read at zero acceleration, then ``qdd = M^-1 (tau - bias)`` is integrated
with fixed-step classical Runge-Kutta.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .dynamics import DynamicsParams, TorqueTrace, inverse_dynamics
from .errors import InstabilityError, SingularInertiaError


@dataclass(frozen=True)
class PowerCurves:
    time: np.ndarray
    power: np.ndarray

    @property
    def peak(self) -> np.ndarray:
        return np.max(np.abs(self.power), axis=0)


def power_curves(trace: TorqueTrace) -> PowerCurves:
    """Per-joint driving power ``tau_i * qd_i`` on the trace's time grid."""
    return PowerCurves(time=np.array(trace.time), power=np.array(trace.power))


@dataclass(frozen=True)
class SimResult:
    time: np.ndarray
    theta: np.ndarray
    omega: np.ndarray
    torque: np.ndarray
    power: np.ndarray
    tracking_error: float | None = None

    @property
    def peak_power(self) -> np.ndarray:
        return np.max(np.abs(self.power), axis=0)


def planned_torque(p: DynamicsParams, traj) -> Callable[[np.ndarray], np.ndarray]:
    """Torque profile that drives ``p`` exactly along the continuous trajectory."""

    def tau(t):
        th, om, al = traj.state_at(t)
        return inverse_dynamics(p, th, om, al)

    return tau


def zero_torque(t) -> np.ndarray:
    return np.zeros((len(np.atleast_1d(t)), 3))


def forward_simulate(
    p: DynamicsParams,
    torque: Callable[[np.ndarray], np.ndarray],
    theta0,
    omega0,
    dt: float = 1e-3,
    duration: float = 2.0,
    reference=None,
) -> SimResult:
    """Integrate the leg under ``torque(t)`` from ``(theta0, omega0)``.

    ``torque`` maps an array of times to an ``(n, 3)`` array; it is sampled
    once on the half-step grid RK4 needs. ``duration`` is rounded to a whole
    number of steps. With ``reference`` (a trajectory) the maximum joint-angle
    deviation at the reference sample times that fall on the step grid is
    recorded.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    nsteps = int(round(duration / dt))
    if nsteps < 1:
        raise ValueError("duration must cover at least one step")
    half = np.arange(2 * nsteps + 1) * (dt / 2.0)
    tau_half = np.ascontiguousarray(np.asarray(torque(half), dtype=float).reshape(2 * nsteps + 1, 3))
    q0 = np.array(theta0, dtype=float)
    w0 = np.array(omega0, dtype=float)
    q, qd, status, step = _kernels.rk4_integrate(*p.kernel_args(), tau_half, q0, w0, float(dt), nsteps)
    t = np.arange(nsteps + 1) * dt
    if status == _kernels.STATUS_SINGULAR:
        raise SingularInertiaError(
            f"mass matrix not positive definite at t={t[step]:.6g} s, theta={q[step].tolist()}"
        )
    if status == _kernels.STATUS_UNSTABLE:
        raise InstabilityError(
            f"joint rates exceeded {_kernels.OMEGA_LIMIT} rad/s at t={t[step]:.6g} s"
        )
    tau = tau_half[::2]
    err = None
    if reference is not None:
        th_ref, _, _ = reference.state_at(np.clip(t, 0.0, reference.phase_bounds[-1]))
        err = float(np.max(np.abs(q - th_ref)))
    return SimResult(time=t, theta=q, omega=qd, torque=tau, power=tau * qd, tracking_error=err)


def round_trip(p: DynamicsParams, traj, dt: float = 1e-3) -> SimResult:
    """Replay the planned torques from the trajectory start and track the deviation."""
    th0, om0, _ = traj.state_at([traj.phase_bounds[0]])
    return forward_simulate(
        p, planned_torque(p, traj), th0[0], om0[0], dt=dt, duration=traj.duration, reference=traj
    )


def passive_drift(p: DynamicsParams, theta0, dt: float = 1e-4, duration: float = 2.0) -> float:
    """Largest deviation of total mechanical energy during an unactuated fall from rest."""
    from .oracle import total_energy

    sim = forward_simulate(p, zero_torque, theta0, np.zeros(3), dt=dt, duration=duration)
    e = total_energy(p, sim.theta, sim.omega)
    return float(np.max(np.abs(e - e[0])))


def mass_matrix_spectrum(p: DynamicsParams, theta) -> np.ndarray:
    from .dynamics import mass_matrix

    M = mass_matrix(p, theta)
    return np.linalg.eigvalsh(0.5 * (M + M.T))
