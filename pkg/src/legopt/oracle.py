"""Finite-difference checks of the closed-form dynamics.

Nothing here touches the torque expressions: torques are rebuilt from
:func:`~legopt.dynamics.kinetic_energy` and
:func:`~legopt.dynamics.potential_energy` alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import DynamicsParams, TorqueTrace, inverse_dynamics, kinetic_energy, potential_energy
from .errors import AlignmentError

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class OracleConfig:
    """Difference steps and pass threshold.

    ``rate_step`` perturbs joint rates. Kinetic energy is quadratic in the
    rates, so that difference carries no truncation error and a large step
    only suppresses roundoff in the nested time derivative.
    ``torque_floor`` (N*m) is the magnitude below which torque components are
    compared absolutely rather than relatively.
    """

    angle_step: float = 1e-6
    time_step: float = 1e-6
    rate_step: float = 1.0
    tolerance: float = 1e-6
    abs_floor: float = 1e-8
    torque_floor: float = 1e-2

    def __post_init__(self):
        if not (self.angle_step > 0 and self.time_step > 0 and self.rate_step > 0):
            raise ValueError("difference steps must be positive")
        if not (self.tolerance > 0 and self.abs_floor >= 0 and self.torque_floor > 0):
            raise ValueError("tolerance and torque_floor must be positive")


@dataclass(frozen=True)
class OracleTorques:
    torque: np.ndarray
    roundoff: np.ndarray
    low_confidence: np.ndarray


def fd_torques(p: DynamicsParams, theta, omega, alpha, cfg: OracleConfig | None = None) -> OracleTorques:
    """Lagrangian torques by central differences of the energy functions.

    Accepts single states ``(3,)`` or batches ``(n, 3)``. The total time
    derivative of ``dEk/dqd`` is taken along the path
    ``(q + s*qd, qd + s*qdd)``.
    """
    cfg = cfg or OracleConfig()
    th = np.asarray(theta, dtype=float)
    w = np.asarray(omega, dtype=float)
    al = np.asarray(alpha, dtype=float)
    hq, hw, ht = cfg.angle_step, cfg.rate_step, cfg.time_step
    eye = np.eye(3)

    def momentum(q, v, i):
        return (kinetic_energy(p, q, v + hw * eye[i]) - kinetic_energy(p, q, v - hw * eye[i])) / (2 * hw)

    tau = np.empty(np.broadcast_shapes(th.shape, w.shape, al.shape))
    for i in range(3):
        ddt = (momentum(th + ht * w, w + ht * al, i) - momentum(th - ht * w, w - ht * al, i)) / (2 * ht)
        dek = (kinetic_energy(p, th + hq * eye[i], w) - kinetic_energy(p, th - hq * eye[i], w)) / (2 * hq)
        dep = (potential_energy(p, th + hq * eye[i]) - potential_energy(p, th - hq * eye[i])) / (2 * hq)
        tau[..., i] = ddt - dek + dep

    scale = np.abs(kinetic_energy(p, th, w)) + np.abs(potential_energy(p, th)) + EPS
    roundoff = EPS * scale * (1.0 / (hw * ht) + 2.0 / hq)
    size = np.max(np.abs(tau), axis=-1)
    low = roundoff > cfg.tolerance * np.maximum(size, cfg.abs_floor)
    return OracleTorques(torque=tau, roundoff=roundoff, low_confidence=low)


def relative_error(candidate, reference, floor: float = 1e-2):
    """Worst per-component error relative to ``|reference|``.

    Components smaller than ``floor`` are normalized by ``floor`` instead, so
    a relative bound ``rtol`` becomes an absolute bound ``rtol * floor`` near zero.
    """
    ref = np.asarray(reference, dtype=float)
    diff = np.abs(np.asarray(candidate, dtype=float) - ref)
    return np.max(diff / np.maximum(np.abs(ref), floor), axis=-1)


@dataclass(frozen=True)
class SweepReport:
    n_states: int
    max_rel_error: float
    worst_index: int
    low_confidence: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tolerance and self.low_confidence == 0


def random_states(n: int, seed: int = 0):
    """Seeded states with angles in [-pi, pi], rates in [-10, 10], accelerations in [-50, 50]."""
    rng = np.random.default_rng(seed)
    theta = rng.uniform(-np.pi, np.pi, (n, 3))
    omega = rng.uniform(-10.0, 10.0, (n, 3))
    alpha = rng.uniform(-50.0, 50.0, (n, 3))
    return theta, omega, alpha


def oracle_sweep(
    p: DynamicsParams, n_states: int = 1000, seed: int = 0, cfg: OracleConfig | None = None
) -> SweepReport:
    cfg = cfg or OracleConfig()
    th, w, al = random_states(n_states, seed)
    ref = fd_torques(p, th, w, al, cfg)
    got = inverse_dynamics(p, th, w, al)
    err = relative_error(got, ref.torque, cfg.torque_floor)
    worst = int(np.argmax(err))
    return SweepReport(
        n_states=n_states,
        max_rel_error=float(err[worst]),
        worst_index=worst,
        low_confidence=int(np.count_nonzero(ref.low_confidence)),
        tolerance=cfg.tolerance,
    )


@dataclass(frozen=True)
class PowerBalanceReport:
    time: np.ndarray
    residual: np.ndarray
    max_residual: float
    rms_residual: float
    tolerance: float
    method: str

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance


def total_energy(p: DynamicsParams, theta, omega):
    return kinetic_energy(p, theta, omega) + potential_energy(p, theta)


def check_power_balance(
    trace: TorqueTrace,
    traj,
    p: DynamicsParams,
    cfg: OracleConfig | None = None,
    method: str = "trajectory",
    tolerance: float = 1e-3,
) -> PowerBalanceReport:
    """Compare total joint power with the rate of change of mechanical energy.

    ``method="trajectory"`` differentiates energy along the continuous
    trajectory with ``cfg.time_step`` (one-sided three-point stencils at the
    ends). ``method="samples"`` differentiates the sampled energy on the
    trajectory grid; its residual is second order in the sample spacing.
    """
    cfg = cfg or OracleConfig()
    n = len(traj.time)
    if len(trace.time) != n or not np.array_equal(trace.time, traj.time):
        raise AlignmentError("torque trace and trajectory time grids differ")
    power = np.sum(trace.torque * traj.omega, axis=-1)
    if method == "samples":
        energy = total_energy(p, traj.theta, traj.omega)
        if n < 3:
            raise AlignmentError("sample differencing needs at least 3 samples")
        rate = np.gradient(energy, traj.time, edge_order=2)
    elif method == "trajectory":
        dt = cfg.time_step
        t = np.asarray(traj.time, dtype=float)
        lo, hi = traj.phase_bounds[0], traj.phase_bounds[-1]

        def energy_at(times):
            th, om, _ = traj.state_at(times)
            return total_energy(p, th, om)

        rate = np.empty(n)
        mid = (t - dt >= lo) & (t + dt <= hi)
        rate[mid] = (energy_at(t[mid] + dt) - energy_at(t[mid] - dt)) / (2 * dt)
        fwd = ~mid & (t - dt < lo)
        if fwd.any():
            tf = t[fwd]
            rate[fwd] = (-3 * energy_at(tf) + 4 * energy_at(tf + dt) - energy_at(tf + 2 * dt)) / (2 * dt)
        bwd = ~mid & ~fwd
        if bwd.any():
            tb = t[bwd]
            rate[bwd] = (3 * energy_at(tb) - 4 * energy_at(tb - dt) + energy_at(tb - 2 * dt)) / (2 * dt)
    else:
        raise ValueError(f"unknown method {method!r}")
    residual = np.abs(power - rate)
    return PowerBalanceReport(
        time=np.array(traj.time),
        residual=residual,
        max_residual=float(np.max(residual)),
        rms_residual=float(np.sqrt(np.mean(residual**2))),
        tolerance=tolerance,
        method=method,
    )
