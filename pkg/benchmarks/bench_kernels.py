"""Time the numba kernels against their pure-numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``. Both paths are timed in one
process regardless of ``LEGOPT_DISABLE_NUMBA``; the first numba call (JIT
compile or cache load) is excluded.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from legopt import _kernels
from legopt._accel import HAVE_NUMBA
from legopt.dynamics import DynamicsParams
from legopt.geometry import initial_geometry
from legopt.simcheck import planned_torque
from legopt.trajectory import plan_swing


def _best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dt", type=float, default=1e-3, help="RK4 step for the round-trip benchmark")
    ap.add_argument("--states", type=int, default=100_000, help="batch size for inverse dynamics")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    p = DynamicsParams.from_geometry(initial_geometry())
    kargs = p.kernel_args()
    rng = np.random.default_rng(0)
    q, qd, qdd = (rng.uniform(-3, 3, (args.states, 3)) for _ in range(3))

    traj = plan_swing()
    nsteps = int(round(traj.duration / args.dt))
    tau_half = np.ascontiguousarray(planned_torque(p, traj)(np.arange(2 * nsteps + 1) * args.dt / 2))
    q0, w0 = traj.theta[0].copy(), traj.omega[0].copy()

    cases = {
        f"inverse dynamics ({args.states} states)": (
            lambda: _kernels.inverse_dynamics_numpy(*kargs, q, qd, qdd),
            lambda: _kernels.inverse_dynamics_numba_batch(*kargs, q, qd, qdd),
        ),
        f"RK4 round trip ({nsteps} steps)": (
            lambda: _kernels.rk4_numpy(*kargs, tau_half, q0, w0, args.dt, nsteps),
            lambda: _kernels.rk4_numba(*kargs, tau_half, q0, w0, args.dt, nsteps),
        ),
    }
    print(f"{'kernel':<36} {'numpy (s)':>10} {'numba (s)':>10} {'speedup':>8} {'max |diff|':>11}")
    for name, (np_fn, nb_fn) in cases.items():
        t_np, out_np = _best_of(np_fn, args.repeat)
        if not HAVE_NUMBA:
            print(f"{name:<36} {t_np:10.4f} {'n/a':>10}")
            continue
        nb_fn()  # compile or load from cache
        t_nb, out_nb = _best_of(nb_fn, args.repeat)
        a = out_np[0] if isinstance(out_np, tuple) else out_np
        b = out_nb[0] if isinstance(out_nb, tuple) else out_nb
        diff = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
        print(f"{name:<36} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f} {diff:11.3e}")


if __name__ == "__main__":
    main()
