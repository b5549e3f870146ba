"""Command-line entry point: ``legopt {plan,evaluate,optimize,verify,simulate}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as config_mod
from . import io
from ._accel import BACKEND
from .dynamics import DynamicsParams, mass_matrix, torque_trace
from .errors import (
    CalibrationInfeasibleError,
    ConfigError,
    InstabilityError,
    InvalidDimsError,
    InvalidDurationError,
    SingularInertiaError,
)
from .geometry import GENOME_FIELDS, SEGMENT_NAMES, LegGeometry, SegmentSpec
from .metrics import evaluate, reduction_percent
from .optimizer import LegProblem, fitness, run_ga
from .oracle import check_power_balance, oracle_sweep, random_states
from .report import comparison_tables, convention_sweep
from .simcheck import passive_drift, power_curves, round_trip

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_VERIFY = 4
EXIT_INFEASIBLE = 5

log = logging.getLogger("legopt")


def _load_config(args) -> config_mod.RunConfig:
    cfg = config_mod.load(args.config) if args.config else config_mod.RunConfig()
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, ga=replace(cfg.ga, seed=args.seed))
    if getattr(args, "energy_mode", None):
        cfg = replace(cfg, energy_mode=args.energy_mode)
    return cfg


def _out_dir(args, cfg) -> Path:
    out = Path(args.out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def load_geometry_file(path, cfg: config_mod.RunConfig) -> LegGeometry:
    """Read a design from JSON.

    Accepts either a best-genome file (``{"genome": {...}}`` or a 9-list,
    optional ``"thickness"``) or per-segment ``l, w, h`` with optional ``t``
    or ``mass``. Missing wall thicknesses come from the configured initial leg.
    """
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read geometry {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    base_t = cfg.initial_geometry().thicknesses
    if isinstance(data, dict) and "genome" in data:
        g = data["genome"]
        if isinstance(g, dict):
            missing = [k for k in GENOME_FIELDS if k not in g]
            if missing:
                raise ConfigError(f"{path}: genome is missing {missing}")
            g = [g[k] for k in GENOME_FIELDS]
        t = data.get("thickness", base_t)
        geom = LegGeometry.from_genome(g, t)
    else:
        if not isinstance(data, dict) or set(data) - set(SEGMENT_NAMES):
            raise ConfigError(f"{path}: expected keys {list(SEGMENT_NAMES)} or a 'genome'")
        segs = []
        for i, name in enumerate(SEGMENT_NAMES):
            if name not in data:
                raise ConfigError(f"{path}: missing segment {name!r}")
            spec = config_mod._segment({"t": base_t[i], **data[name]}, name)
            if "mass" in data[name] and "t" not in data[name]:
                spec = SegmentSpec(spec.l, spec.w, spec.h, None, spec.mass)
            segs.append(spec.resolve(cfg.material.density))
        geom = LegGeometry(*segs)
    geom.validate(cfg.allow_degenerate)
    return geom


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_plan(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    traj = cfg.plan()
    geom = cfg.initial_geometry()
    io.write_trajectory_csv(out / "trajectory.csv", traj)
    io.write_foot_path_csv(out / "foot_path.csv", geom, traj, cfg.material.base_height)
    print(f"wrote {len(traj)} trajectory samples to {out}")
    return EXIT_OK


def _geometry_dict(geom: LegGeometry) -> dict:
    return {
        name: {"l": s.l, "w": s.w, "h": s.h, "t": s.t} for name, s in zip(SEGMENT_NAMES, geom.segments)
    }


def cmd_evaluate(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    traj = cfg.plan()
    initial = cfg.initial_geometry()
    geom = load_geometry_file(args.geometry, cfg) if args.geometry else initial
    params = DynamicsParams.from_geometry(geom, cfg.material, cfg.inertia_model, cfg.allow_degenerate)
    trace = torque_trace(params, traj)
    io.write_torque_csv(out / "torque_trace.csv", trace)
    metrics = evaluate(geom, traj, cfg.material, cfg.energy_mode, cfg.inertia_model)
    report = {
        "geometry": _geometry_dict(geom),
        "energy_mode": cfg.energy_mode,
        "inertia_model": cfg.inertia_model,
        "metrics": metrics.to_dict(),
        "convention_sweep": convention_sweep(geom, traj, cfg.material),
    }
    if args.geometry:
        base = evaluate(initial, traj, cfg.material, cfg.energy_mode, cfg.inertia_model)
        report["baseline"] = base.to_dict()
        report["reduction_percent"] = {
            "peak_torque": reduction_percent(base.peak_torque, metrics.peak_torque),
            "energy": reduction_percent(base.energy, metrics.energy),
        }
        report["ratios"] = {
            "peak_torque": metrics.peak_torque / base.peak_torque,
            "energy": metrics.energy / base.energy,
            "reach": metrics.reach / base.reach,
            "stiffness": metrics.stiffness / base.stiffness,
        }
        if cfg.energy_mode == "absolute":
            report["fitness"] = fitness(metrics, base, cfg.ga_config()).to_dict()
        table = comparison_tables(initial, geom, base, metrics)
        io.write_text(out / "comparison.txt", table)
        print(table)
    io.write_json(out / "metrics.json", report)
    print("peak torque (N*m):", " ".join(f"{v:.2f}" for v in metrics.peak_torque))
    print("energy (J):       ", " ".join(f"{v:.2f}" for v in metrics.energy))
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    ga_cfg = cfg.ga_config()
    if ga_cfg.energy_mode != "absolute":
        raise ConfigError("energy_mode: optimization needs 'absolute' energy (signed work of a closed swing is ~0)")
    traj = cfg.plan()
    problem = LegProblem(
        cfg.initial_geometry(), traj, cfg.material, ga_cfg.energy_mode, cfg.inertia_model
    )
    result = run_ga(ga_cfg, problem, threads=args.threads)
    write_optimize_artifacts(out, cfg, problem, result)
    best = result.best.fitness
    print(
        f"best eval {best.eval:.6f} (F {best.objective:.6f}), feasible={best.feasible}, "
        f"stabilized at generation {result.stabilized_at()}"
    )
    if not best.feasible:
        log.warning("optimization finished without a feasible design")
        return EXIT_INFEASIBLE
    return EXIT_OK


def write_optimize_artifacts(out: Path, cfg, problem: LegProblem, result) -> None:
    h = result.history
    io.write_csv(
        out / "history.csv",
        ["generation", "best_eval", "best_F", "F_T", "F_Q", "F_D", "F_EI"],
        [
            [r.generation for r in h],
            [r.best.eval for r in h],
            [r.best.objective for r in h],
            [r.best.penalty_torque for r in h],
            [r.best.penalty_energy for r in h],
            [r.best.penalty_reach for r in h],
            [r.best.penalty_stiffness for r in h],
        ],
    )
    best_geom = problem.geometry(result.best.genome)
    best_metrics = problem.metrics(best_geom)
    io.write_json(
        out / "best_genome.json",
        {
            "genome": result.best.as_dict(),
            "thickness": problem.thicknesses,
            "fitness": result.best.fitness.to_dict(),
            "metrics": best_metrics.to_dict(),
            "baseline": problem.baseline.to_dict(),
            "seed": result.config.seed,
        },
    )
    io.write_text(
        out / "comparison.txt",
        comparison_tables(problem.initial, best_geom, problem.baseline, best_metrics),
    )
    io.write_json(
        out / "run_report.json",
        {
            "status": "feasible" if result.feasible else "infeasible",
            "generations": len(h) - 1,
            "stabilized_at": result.stabilized_at(),
            "converged": result.converged(),
            "bounds": result.bounds,
            "config": cfg.to_dict(),
        },
    )


def run_verification(cfg: config_mod.RunConfig) -> dict:
    """Run every numerical self-check; returns a report with an overall ``passed`` flag."""
    v = cfg.verify
    checks = {}
    geom = cfg.initial_geometry()
    traj = cfg.plan()
    params = DynamicsParams.from_geometry(geom, cfg.material, cfg.inertia_model, cfg.allow_degenerate)

    sweep = oracle_sweep(params, v.n_states, v.seed, cfg.oracle)
    checks["oracle_sweep"] = {
        "passed": sweep.passed,
        "max_rel_error": sweep.max_rel_error,
        "tolerance": sweep.tolerance,
        "low_confidence_states": sweep.low_confidence,
        "n_states": sweep.n_states,
    }

    trace = torque_trace(params, traj)
    pb = check_power_balance(trace, traj, params, cfg.oracle, "trajectory", v.power_balance_tolerance)
    checks["power_balance"] = {
        "passed": pb.passed,
        "max_residual_W": pb.max_residual,
        "rms_residual_W": pb.rms_residual,
        "tolerance_W": pb.tolerance,
    }
    pbs = check_power_balance(trace, traj, params, cfg.oracle, "samples", v.power_balance_tolerance)
    checks["power_balance_sampled"] = {
        "informational": True,
        "max_residual_W": pbs.max_residual,
        "rms_residual_W": pbs.rms_residual,
        "samples": len(traj),
    }

    th, _, _ = random_states(32, v.seed)
    asym = 0.0
    for pose in th:
        M = mass_matrix(params, pose)
        asym = max(asym, float(np.max(np.abs(M - M.T)) / np.max(np.abs(M))))
    checks["mass_matrix_symmetry"] = {
        "passed": asym < v.symmetry_tolerance,
        "max_rel_asymmetry": asym,
        "tolerance": v.symmetry_tolerance,
    }

    try:
        sim = round_trip(params, traj, v.sim_dt)
        checks["forward_round_trip"] = {
            "passed": sim.tracking_error < v.tracking_tolerance,
            "max_angle_error_rad": sim.tracking_error,
            "tolerance_rad": v.tracking_tolerance,
            "dt": v.sim_dt,
        }
    except (SingularInertiaError, InstabilityError) as exc:
        checks["forward_round_trip"] = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
    try:
        drift = passive_drift(params, traj.theta[0], v.passive_dt, v.passive_duration)
        checks["passive_energy_drift"] = {
            "passed": drift < v.drift_tolerance,
            "max_drift_J": drift,
            "tolerance_J": v.drift_tolerance,
            "dt": v.passive_dt,
        }
    except (SingularInertiaError, InstabilityError) as exc:
        checks["passive_energy_drift"] = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}

    passed = all(c.get("passed", True) for c in checks.values())
    return {"passed": passed, "backend": BACKEND, "checks": checks}


def _format_verification(report: dict) -> str:
    lines = []
    for name, c in report["checks"].items():
        if c.get("informational"):
            status = "INFO"
        else:
            status = "PASS" if c["passed"] else "FAIL"
        detail = ", ".join(f"{k}={v}" for k, v in c.items() if k not in ("passed", "informational"))
        lines.append(f"[{status}] {name}: {detail}")
    lines.append(f"overall: {'PASS' if report['passed'] else 'FAIL'}")
    return "\n".join(lines)


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    report = run_verification(cfg)
    text = _format_verification(report)
    io.write_text(out / "verify_report.txt", text)
    io.write_json(out / "verify_report.json", report)
    print(text)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    traj = cfg.plan()
    designs = {"initial": cfg.initial_geometry()}
    if args.geometry:
        designs["optimized"] = load_geometry_file(args.geometry, cfg)
    summary = {}
    for label, geom in designs.items():
        params = DynamicsParams.from_geometry(geom, cfg.material, cfg.inertia_model, cfg.allow_degenerate)
        curves = power_curves(torque_trace(params, traj))
        io.write_power_csv(out / f"power_{label}.csv", curves.time, curves.power)
        sim = round_trip(params, traj, cfg.verify.sim_dt)
        summary[label] = {
            "peak_power_W": curves.peak,
            "simulated_peak_power_W": sim.peak_power,
            "tracking_error_rad": sim.tracking_error,
        }
    if "optimized" in summary:
        summary["reduction_percent"] = {
            "peak_power": reduction_percent(
                summary["initial"]["peak_power_W"], summary["optimized"]["peak_power_W"]
            ),
            "simulated_peak_power": reduction_percent(
                summary["initial"]["simulated_peak_power_W"],
                summary["optimized"]["simulated_peak_power_W"],
            ),
        }
    io.write_json(out / "simulation_summary.json", summary)
    for label, s in summary.items():
        if label == "reduction_percent":
            print("peak power reduction (%):", " ".join(f"{v:.2f}" for v in s["peak_power"]))
        else:
            print(f"{label} peak power (W):", " ".join(f"{v:.2f}" for v in s["peak_power_W"]))
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration (defaults if omitted)")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides config output_dir)")
    common.add_argument("--seed", type=int, help="GA seed (overrides config)")
    common.add_argument("--energy-mode", choices=("absolute", "signed"), help="energy integration mode")
    common.add_argument("--threads", type=int, default=1, help="worker threads for fitness evaluation")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="legopt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("plan", parents=[common], help="write trajectory and foot-path CSVs").set_defaults(
        func=cmd_plan
    )
    p = sub.add_parser("evaluate", parents=[common], help="torques and metrics for one design")
    p.add_argument("--geometry", metavar="PATH", help="design JSON (defaults to the initial leg)")
    p.set_defaults(func=cmd_evaluate)
    sub.add_parser("optimize", parents=[common], help="run the genetic algorithm").set_defaults(
        func=cmd_optimize
    )
    sub.add_parser("verify", parents=[common], help="oracle, power-balance and simulation checks").set_defaults(
        func=cmd_verify
    )
    p = sub.add_parser("simulate", parents=[common], help="driving-power curves, before and after")
    p.add_argument("--geometry", metavar="PATH", help="optimized design JSON to compare")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidDimsError, InvalidDurationError, CalibrationInfeasibleError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SingularInertiaError, InstabilityError) as exc:
        print(f"verification error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
