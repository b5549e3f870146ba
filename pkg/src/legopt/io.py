"""CSV/JSON writers for run artifacts.

Floats are written with ``repr``, Python's shortest round-trip form, so
re-reading a file reproduces the exact doubles and identical runs produce
identical bytes.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .kinematics import forward_kinematics


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if math.isnan(f):
        return "nan"
    return repr(f)


def write_csv(path, header, columns) -> Path:
    """Write equal-length ``columns`` under ``header`` (LF line endings)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = [np.asarray(c) for c in columns]
    n = len(cols[0]) if cols else 0
    if any(len(c) != n for c in cols):
        raise ValueError("CSV columns have different lengths")
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(n):
            w.writerow([_fmt(c[i]) for c in cols])
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {name: np.array([float(r[i]) for r in body]) for i, name in enumerate(header)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text if text.endswith("\n") else text + "\n")
    return path


TRAJECTORY_HEADER = [
    "time", "theta1", "theta2", "theta3", "omega1", "omega2", "omega3", "alpha1", "alpha2", "alpha3",
]


def write_trajectory_csv(path, traj) -> Path:
    cols = [traj.time] + [traj.theta[:, j] for j in range(3)]
    cols += [traj.omega[:, j] for j in range(3)] + [traj.alpha[:, j] for j in range(3)]
    return write_csv(path, TRAJECTORY_HEADER, cols)


def write_foot_path_csv(path, geom, traj, base_height: float = 0.0) -> Path:
    fp = forward_kinematics(geom, traj.theta, base_height)
    return write_csv(path, ["time", "x", "y", "z", "r"], [traj.time, fp.x, fp.y, fp.z, fp.r])


def write_torque_csv(path, trace) -> Path:
    cols = [trace.time] + [trace.torque[:, j] for j in range(3)] + [trace.power[:, j] for j in range(3)]
    return write_csv(path, ["time", "tau1", "tau2", "tau3", "P1", "P2", "P3"], cols)


def write_power_csv(path, time, power) -> Path:
    return write_csv(path, ["time", "P1", "P2", "P3"], [time] + [power[:, j] for j in range(3)])
