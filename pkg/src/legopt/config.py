"""Run configuration: strict JSON in, JSON out.

Unknown keys anywhere are rejected so that a misspelled physics constant can
never fall back silently to its default. Missing keys take defaults.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .geometry import (
    INERTIA_FACTORS,
    INITIAL_SEGMENTS,
    SEGMENT_NAMES,
    LegGeometry,
    MaterialParams,
    SegmentSpec,
)
from .metrics import ENERGY_MODES
from .optimizer import AGGREGATIONS, GAConfig
from .oracle import OracleConfig
from .trajectory import Waypoints, default_waypoints, plan_swing

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class TrajectoryConfig:
    total_time: float = 2.0
    samples_per_phase: int = 100
    theta: tuple = tuple(map(tuple, default_waypoints().theta.tolist()))
    omega: tuple = tuple(map(tuple, default_waypoints().omega.tolist()))
    alpha: tuple = tuple(map(tuple, default_waypoints().alpha.tolist()))

    def waypoints(self) -> Waypoints:
        return Waypoints(np.array(self.theta), np.array(self.omega), np.array(self.alpha))


@dataclass(frozen=True)
class VerifyConfig:
    n_states: int = 1000
    seed: int = 0
    power_balance_tolerance: float = 1e-3
    sim_dt: float = 1e-3
    tracking_tolerance: float = 1e-3
    passive_dt: float = 1e-4
    passive_duration: float = 2.0
    drift_tolerance: float = 1e-6
    symmetry_tolerance: float = 1e-9


@dataclass(frozen=True)
class RunConfig:
    material: MaterialParams = field(default_factory=MaterialParams)
    geometry: dict = field(default_factory=lambda: dict(INITIAL_SEGMENTS))
    allow_degenerate: bool = False
    inertia_model: str = "com"
    trajectory: TrajectoryConfig = field(default_factory=TrajectoryConfig)
    ga: GAConfig = field(default_factory=GAConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    energy_mode: str = "absolute"
    aggregation: str = "mean"
    output_dir: str = "out"

    def initial_geometry(self) -> LegGeometry:
        segs = tuple(self.geometry[n].resolve(self.material.density) for n in SEGMENT_NAMES)
        geom = LegGeometry(*segs)
        geom.validate(self.allow_degenerate)
        return geom

    def plan(self):
        t = self.trajectory
        return plan_swing(t.waypoints(), t.total_time, t.samples_per_phase)

    def ga_config(self) -> GAConfig:
        from dataclasses import replace

        return replace(self.ga, energy_mode=self.energy_mode, aggregation=self.aggregation)

    def to_dict(self) -> dict:
        ga = asdict(self.ga)
        ga.pop("energy_mode")
        ga.pop("aggregation")
        if ga["bounds"] is not None:
            ga["bounds"] = [list(b) for b in ga["bounds"]]
        ga["weights"] = list(ga["weights"])
        geometry = {}
        for name in SEGMENT_NAMES:
            spec = self.geometry[name]
            d = {"l": spec.l, "w": spec.w, "h": spec.h}
            if spec.t is not None:
                d["t"] = spec.t
            if spec.mass is not None:
                d["mass"] = spec.mass
            geometry[name] = d
        traj = asdict(self.trajectory)
        for k in ("theta", "omega", "alpha"):
            traj[k] = [list(r) for r in traj[k]]
        return {
            "schema_version": SCHEMA_VERSION,
            "material": asdict(self.material),
            "geometry": geometry,
            "allow_degenerate": self.allow_degenerate,
            "inertia_model": self.inertia_model,
            "trajectory": traj,
            "ga": ga,
            "oracle": asdict(self.oracle),
            "verify": asdict(self.verify),
            "energy_mode": self.energy_mode,
            "aggregation": self.aggregation,
            "output_dir": self.output_dir,
        }


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------


def _check_keys(data, allowed, path):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or '<root>'}: expected an object, got {type(data).__name__}")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        where = f"{path}." if path else ""
        raise ConfigError(f"unknown field(s): {', '.join(where + k for k in unknown)}")


def _number(v, path, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {v!r}")
    if integer:
        if isinstance(v, float) and not v.is_integer():
            raise ConfigError(f"{path}: expected an integer, got {v!r}")
        return int(v)
    return float(v)


def _matrix(v, path, shape):
    try:
        arr = np.array(v, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: expected a numeric array") from None
    if arr.shape != shape or any(isinstance(x, bool) for x in np.ravel(np.array(v, dtype=object))):
        raise ConfigError(f"{path}: expected a numeric array of shape {shape}")
    return tuple(map(tuple, arr.tolist()))


def _coerce(cls, data, path, special=None):
    """Build dataclass ``cls`` from ``data`` using defaults for missing keys."""
    special = special or {}
    names = [f.name for f in fields(cls)]
    _check_keys(data, names, path)
    defaults = cls()
    kwargs = {}
    for f in fields(cls):
        if f.name not in data:
            continue
        v = data[f.name]
        p = f"{path}.{f.name}" if path else f.name
        if f.name in special:
            kwargs[f.name] = special[f.name](v, p)
            continue
        default = getattr(defaults, f.name)
        if isinstance(default, bool):
            if not isinstance(v, bool):
                raise ConfigError(f"{p}: expected true/false, got {v!r}")
            kwargs[f.name] = v
        elif isinstance(default, int):
            kwargs[f.name] = _number(v, p, integer=True)
        elif isinstance(default, float):
            kwargs[f.name] = _number(v, p)
        elif isinstance(default, str):
            if not isinstance(v, str):
                raise ConfigError(f"{p}: expected a string, got {v!r}")
            kwargs[f.name] = v
        else:
            kwargs[f.name] = v
    try:
        return cls(**{**{k: getattr(defaults, k) for k in names}, **kwargs})
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _bounds(v, path):
    if v is None:
        return None
    return _matrix(v, path, (9, 2))


def _weights(v, path):
    if not isinstance(v, list) or len(v) != 2:
        raise ConfigError(f"{path}: expected two numbers")
    return (_number(v[0], f"{path}[0]"), _number(v[1], f"{path}[1]"))


def _segment(data, path):
    _check_keys(data, ("l", "w", "h", "t", "mass"), path)
    for k in ("l", "w", "h"):
        if k not in data:
            raise ConfigError(f"{path}.{k}: missing")
    vals = {k: _number(data[k], f"{path}.{k}") for k in ("l", "w", "h")}
    t = None if data.get("t") is None else _number(data["t"], f"{path}.t")
    mass = None if data.get("mass") is None else _number(data["mass"], f"{path}.mass")
    if t is None and mass is None:
        raise ConfigError(f"{path}: give either a wall thickness 't' or a 'mass' to calibrate from")
    return SegmentSpec(t=t, mass=mass, **vals)


def _choice(options):
    def check(v, path):
        if v not in options:
            raise ConfigError(f"{path}: must be one of {list(options)}, got {v!r}")
        return v

    return check


def parse_config(data: dict) -> RunConfig:
    """Validate a decoded JSON object and build a :class:`RunConfig`."""
    allowed = ["schema_version"] + [f.name for f in fields(RunConfig)]
    _check_keys(data, allowed, "")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: unsupported version {version!r} (expected {SCHEMA_VERSION})")
    kw = {}
    if "material" in data:
        kw["material"] = _coerce(MaterialParams, data["material"], "material")
    if "geometry" in data:
        g = data["geometry"]
        _check_keys(g, SEGMENT_NAMES, "geometry")
        geometry = dict(INITIAL_SEGMENTS)
        for name in SEGMENT_NAMES:
            if name in g:
                geometry[name] = _segment(g[name], f"geometry.{name}")
        kw["geometry"] = geometry
    if "allow_degenerate" in data:
        if not isinstance(data["allow_degenerate"], bool):
            raise ConfigError("allow_degenerate: expected true/false")
        kw["allow_degenerate"] = data["allow_degenerate"]
    if "inertia_model" in data:
        kw["inertia_model"] = _choice(tuple(INERTIA_FACTORS))(data["inertia_model"], "inertia_model")
    if "trajectory" in data:
        mat3 = lambda v, p: _matrix(v, p, (3, 3))  # noqa: E731
        kw["trajectory"] = _coerce(
            TrajectoryConfig, data["trajectory"], "trajectory",
            special={"theta": mat3, "omega": mat3, "alpha": mat3},
        )
        t = kw["trajectory"]
        if not t.total_time > 0:
            raise ConfigError(f"trajectory.total_time: must be positive, got {t.total_time}")
        if t.samples_per_phase < 1:
            raise ConfigError("trajectory.samples_per_phase: must be at least 1")
    if "ga" in data:
        ga_data = data["ga"]
        _check_keys(
            ga_data, [f.name for f in fields(GAConfig) if f.name not in ("energy_mode", "aggregation")], "ga"
        )
        kw["ga"] = _coerce(GAConfig, ga_data, "ga", special={"bounds": _bounds, "weights": _weights})
    if "oracle" in data:
        kw["oracle"] = _coerce(OracleConfig, data["oracle"], "oracle")
    if "verify" in data:
        kw["verify"] = _coerce(VerifyConfig, data["verify"], "verify")
    if "energy_mode" in data:
        kw["energy_mode"] = _choice(ENERGY_MODES)(data["energy_mode"], "energy_mode")
    if "aggregation" in data:
        kw["aggregation"] = _choice(AGGREGATIONS)(data["aggregation"], "aggregation")
    if "output_dir" in data:
        if not isinstance(data["output_dir"], str):
            raise ConfigError("output_dir: expected a string")
        kw["output_dir"] = data["output_dir"]
    return RunConfig(**kw)


def loads(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_config(data)


def load(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        return loads(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def dumps(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2) + "\n"
