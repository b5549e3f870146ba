"""Human-readable comparison tables and model-convention sweeps."""

from __future__ import annotations

import numpy as np

from .geometry import INERTIA_FACTORS, SEGMENT_NAMES, LegGeometry, MaterialParams
from .metrics import ENERGY_MODES, MetricValues, evaluate, reduction_percent

JOINT_NAMES = ("root", "hip", "knee")


def structure_table(before: LegGeometry, after: LegGeometry, m_before, m_after) -> str:
    lines = [
        "Structural parameters",
        f"{'segment':<8} {'l (mm)':>16} {'h x w (mm)':>26} {'mass (kg)':>18}",
        f"{'':<8} {'before':>7}  {'after':>7} {'before':>12}  {'after':>12} {'before':>8}  {'after':>8}",
    ]
    for i, name in enumerate(SEGMENT_NAMES):
        b, a = before.segments[i], after.segments[i]
        lines.append(
            f"{name:<8} {b.l * 1e3:7.1f}  {a.l * 1e3:7.1f} "
            f"{b.h * 1e3:5.1f} x {b.w * 1e3:5.1f}  {a.h * 1e3:5.1f} x {a.w * 1e3:5.1f} "
            f"{m_before[i]:8.2f}  {m_after[i]:8.2f}"
        )
    return "\n".join(lines)


def _joint_table(title, unit, before, after) -> str:
    red = reduction_percent(before, after)
    lines = [
        title,
        f"{'joint':<6} {'before (' + unit + ')':>14} {'after (' + unit + ')':>14} {'reduction (%)':>14}",
    ]
    for i, name in enumerate(JOINT_NAMES):
        lines.append(f"{name:<6} {before[i]:14.2f} {after[i]:14.2f} {red[i]:14.2f}")
    return "\n".join(lines)


def comparison_tables(
    before_geom: LegGeometry, after_geom: LegGeometry, before: MetricValues, after: MetricValues
) -> str:
    parts = [
        structure_table(before_geom, after_geom, before.masses, after.masses),
        _joint_table("Peak joint torque", "N*m", before.peak_torque, after.peak_torque),
        _joint_table("Joint energy", "J", before.energy, after.energy),
        f"Farthest foot reach: {before.reach:.4f} m -> {after.reach:.4f} m "
        f"({after.reach / before.reach:.4f} of initial)",
        "Bending stiffness ratio (after/before): "
        + ", ".join(
            f"{n} {r:.4f}" for n, r in zip(SEGMENT_NAMES, np.asarray(after.stiffness) / before.stiffness)
        ),
    ]
    return "\n\n".join(parts) + "\n"


def convention_sweep(geom: LegGeometry, traj, mat: MaterialParams | None = None) -> list[dict]:
    """Peak torques and energies under every inertia model and energy mode."""
    rows = []
    for inertia in INERTIA_FACTORS:
        for mode in ENERGY_MODES:
            m = evaluate(geom, traj, mat, energy_mode=mode, inertia=inertia)
            rows.append(
                {
                    "inertia_model": inertia,
                    "energy_mode": mode,
                    "peak_torque": [float(v) for v in m.peak_torque],
                    "energy": [float(v) for v in m.energy],
                }
            )
    return rows
