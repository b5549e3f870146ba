"""Joint-space swing trajectories built from two quintic segments per joint."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidDurationError, OutOfRangeError

PI = math.pi


@dataclass(frozen=True)
class BoundaryConditions:
    theta_a: float
    omega_a: float
    alpha_a: float
    theta_b: float
    omega_b: float
    alpha_b: float
    duration: float


@dataclass(frozen=True)
class QuinticSegment:
    """``theta(t) = sum(c[k] * t**k)`` for local time ``t`` in ``[0, duration]``."""

    coeffs: tuple[float, float, float, float, float, float]
    duration: float

    def __call__(self, t):
        return eval_quintic(self, t)


def solve_quintic(bc: BoundaryConditions) -> QuinticSegment:
    """Quintic through the six boundary conditions of ``bc``.

    The first three coefficients follow directly from the start state; the
    remaining three come from the closed-form inverse of the end-state block.
    """
    T = bc.duration
    if not (math.isfinite(T) and T > 0):
        raise InvalidDurationError(f"segment duration must be positive, got {T}")
    c0 = bc.theta_a
    c1 = bc.omega_a
    c2 = bc.alpha_a / 2.0
    d = bc.theta_b - bc.theta_a
    c3 = (20 * d - (8 * bc.omega_b + 12 * bc.omega_a) * T - (3 * bc.alpha_a - bc.alpha_b) * T**2) / (
        2 * T**3
    )
    c4 = (
        -30 * d + (14 * bc.omega_b + 16 * bc.omega_a) * T + (3 * bc.alpha_a - 2 * bc.alpha_b) * T**2
    ) / (2 * T**4)
    c5 = (12 * d - 6 * (bc.omega_b + bc.omega_a) * T + (bc.alpha_b - bc.alpha_a) * T**2) / (2 * T**5)
    return QuinticSegment(coeffs=(c0, c1, c2, c3, c4, c5), duration=T)


def _eval_poly(c, t):
    c0, c1, c2, c3, c4, c5 = c
    theta = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))))
    omega = c1 + t * (2 * c2 + t * (3 * c3 + t * (4 * c4 + t * 5 * c5)))
    alpha = 2 * c2 + t * (6 * c3 + t * (12 * c4 + t * 20 * c5))
    return theta, omega, alpha


def eval_quintic(seg: QuinticSegment, t):
    """Angle, rate and acceleration at local time ``t`` (scalar or array)."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or np.any(arr > seg.duration) or not np.all(np.isfinite(arr)):
        raise OutOfRangeError(f"t outside [0, {seg.duration}]")
    out = _eval_poly(seg.coeffs, arr)
    if arr.ndim == 0:
        return tuple(float(v) for v in out)
    return out


@dataclass(frozen=True)
class Waypoints:
    """Start, mid and end joint states for the three joints.

    Each field is a ``(3, 3)`` array indexed ``[waypoint, joint]``.
    """

    theta: np.ndarray
    omega: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        for name in ("theta", "omega", "alpha"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (3, 3):
                raise ValueError(f"waypoint {name} must have shape (3, 3), got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"waypoint {name} contains non-finite values")
            object.__setattr__(self, name, arr)


def default_waypoints() -> Waypoints:
    """Lift-and-swing profile: yaw sweeps -45 to +45 deg while hip and knee lift the foot."""
    return Waypoints(
        theta=np.array(
            [[-PI / 4, -PI / 4, -PI / 4], [0.0, PI / 4, -3 * PI / 4], [PI / 4, -PI / 4, -PI / 4]]
        ),
        omega=np.array([[0.0, 0.0, 0.0], [PI / 2, 0.0, 0.0], [0.0, 0.0, 0.0]]),
        alpha=np.zeros((3, 3)),
    )


@dataclass(frozen=True)
class TrajectorySample:
    time: float
    theta: np.ndarray
    omega: np.ndarray
    alpha: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    """Sampled two-phase trajectory plus the segments that generated it.

    ``theta``, ``omega`` and ``alpha`` have shape ``(n, 3)``; ``time`` is
    global and strictly increasing. ``segments[p][j]`` is the quintic of
    joint ``j`` in phase ``p``.
    """

    time: np.ndarray
    theta: np.ndarray
    omega: np.ndarray
    alpha: np.ndarray
    phase_bounds: tuple[float, ...]
    segments: tuple[tuple[QuinticSegment, ...], ...]

    def __len__(self) -> int:
        return len(self.time)

    @property
    def duration(self) -> float:
        return self.phase_bounds[-1] - self.phase_bounds[0]

    def samples(self) -> Iterator[TrajectorySample]:
        for i in range(len(self.time)):
            yield TrajectorySample(
                float(self.time[i]), self.theta[i], self.omega[i], self.alpha[i]
            )

    def state_at(self, t):
        """Evaluate the continuous trajectory at global times ``t``.

        Returns ``(theta, omega, alpha)`` each of shape ``(len(t), 3)``.
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        lo, hi = self.phase_bounds[0], self.phase_bounds[-1]
        if np.any(t < lo) or np.any(t > hi) or not np.all(np.isfinite(t)):
            raise OutOfRangeError(f"t outside [{lo}, {hi}]")
        out = np.empty((3, len(t), 3))
        # A join time belongs to the later phase; continuity makes either choice exact.
        phase = np.searchsorted(np.asarray(self.phase_bounds[1:-1]), t, side="right")
        for p, segs in enumerate(self.segments):
            mask = phase == p
            if not mask.any():
                continue
            local = np.clip(t[mask] - self.phase_bounds[p], 0.0, segs[0].duration)
            for j, seg in enumerate(segs):
                th, om, al = _eval_poly(seg.coeffs, local)
                out[0, mask, j] = th
                out[1, mask, j] = om
                out[2, mask, j] = al
        return out[0], out[1], out[2]


def plan_swing(
    waypoints: Waypoints | None = None,
    total_time: float = 2.0,
    samples_per_phase: int = 100,
) -> Trajectory:
    """Plan start -> mid -> end with one quintic per joint and phase.

    The two phases split ``total_time`` equally. The result has
    ``2 * samples_per_phase + 1`` samples; the shared midpoint is stored once.
    """
    wp = waypoints if waypoints is not None else default_waypoints()
    if not (math.isfinite(total_time) and total_time > 0):
        raise InvalidDurationError(f"total_time must be positive, got {total_time}")
    if samples_per_phase < 1:
        raise ValueError("samples_per_phase must be at least 1")
    T = total_time / 2.0
    segments = []
    for p in range(2):
        segments.append(
            tuple(
                solve_quintic(
                    BoundaryConditions(
                        wp.theta[p, j], wp.omega[p, j], wp.alpha[p, j],
                        wp.theta[p + 1, j], wp.omega[p + 1, j], wp.alpha[p + 1, j],
                        T,
                    )
                )
                for j in range(3)
            )
        )
    local = np.linspace(0.0, T, samples_per_phase + 1)
    n = 2 * samples_per_phase + 1
    theta = np.empty((n, 3))
    omega = np.empty((n, 3))
    alpha = np.empty((n, 3))
    for p, segs in enumerate(segments):
        rows = slice(0, samples_per_phase + 1) if p == 0 else slice(samples_per_phase, n)
        for j, seg in enumerate(segs):
            theta[rows, j], omega[rows, j], alpha[rows, j] = _eval_poly(seg.coeffs, local)
    # The join sample carries the midpoint waypoint exactly.
    theta[samples_per_phase] = wp.theta[1]
    omega[samples_per_phase] = wp.omega[1]
    alpha[samples_per_phase] = wp.alpha[1]
    time = np.concatenate([local, T + local[1:]])
    return Trajectory(
        time=time,
        theta=theta,
        omega=omega,
        alpha=alpha,
        phase_bounds=(0.0, T, 2 * T),
        segments=tuple(segments),
    )


def constant_trajectory(pose: Sequence[float], total_time: float = 2.0, samples_per_phase: int = 100) -> Trajectory:
    """A trajectory that holds ``pose`` with zero rates."""
    pose = np.asarray(pose, dtype=float)
    wp = Waypoints(theta=np.tile(pose, (3, 1)), omega=np.zeros((3, 3)), alpha=np.zeros((3, 3)))
    return plan_swing(wp, total_time, samples_per_phase)
