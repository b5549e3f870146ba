"""Forward kinematics of the yaw / pitch / pitch leg chain.

The root joint yaws about the vertical axis. Hip and knee pitch in the
vertical plane that contains the leg; the femur makes angle ``theta2``
with the horizontal and the tibia direction is ``-(theta3 - theta2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError
from .geometry import LegGeometry


@dataclass(frozen=True)
class FootPosition:
    r: np.ndarray
    z: np.ndarray
    azimuth: np.ndarray

    @property
    def x(self):
        return self.r * np.cos(self.azimuth)

    @property
    def y(self):
        return self.r * np.sin(self.azimuth)


def forward_kinematics(geom: LegGeometry, theta, base_height: float = 0.0) -> FootPosition:
    """Foot position for joint angles ``theta`` of shape ``(3,)`` or ``(n, 3)``."""
    l1, l2, l3 = geom.lengths
    th = np.asarray(theta, dtype=float)
    t1, t2, t3 = th[..., 0], th[..., 1], th[..., 2]
    knee = t3 - t2
    r = l1 + l2 * np.cos(t2) + l3 * np.cos(knee)
    z = base_height + l2 * np.sin(t2) - l3 * np.sin(knee)
    return FootPosition(r=r, z=z, azimuth=t1)


def max_reach(geom: LegGeometry, traj) -> float:
    """Largest horizontal distance of the foot from the root axis over the samples."""
    if len(traj.time) == 0:
        raise EmptyInputError("trajectory has no samples")
    return float(np.max(forward_kinematics(geom, traj.theta).r))
