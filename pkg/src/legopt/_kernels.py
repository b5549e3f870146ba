"""Hot numeric kernels for the leg dynamics.

Every kernel exists twice: a scalar-loop version compiled with numba and a
vectorized numpy version. The public names at the bottom of the module are
bound to one or the other according to :mod:`legopt._accel`. Both versions
take per-segment arrays ``l, m, a, I`` of length 3 and gravity ``g``.

Mass matrix (kinetic energy ``0.5 * qd^T M(q) qd``) in terms of
``R = l1 + l2 cos q2 + a3 cos(q3 - q2)``::

    M11 = m1 a1^2 + I1 + m2 (l1 + a2 cos q2)^2 + m3 R^2
    M22 = m2 a2^2 + I2 + m3 (l2^2 + a3^2 + 2 l2 a3 cos q3)
    M23 = -m3 (l2 a3 cos q3 + a3^2)
    M33 = m3 a3^2 + I3

with ``M12 = M13 = 0``.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import USE_NUMBA, njit

STATUS_OK = 0
STATUS_SINGULAR = 1
STATUS_UNSTABLE = 2

# Cholesky pivots below this fraction of the largest diagonal count as singular.
PIVOT_RTOL = 1e-12
OMEGA_LIMIT = 1e3


# --------------------------------------------------------------------------
# numpy path
# --------------------------------------------------------------------------


def inverse_dynamics_numpy(l, m, a, I, g, q, qd, qdd):
    q = np.asarray(q, dtype=float)
    qd = np.asarray(qd, dtype=float)
    qdd = np.asarray(qdd, dtype=float)
    l1, l2, _ = l
    m1, m2, m3 = m
    a1, a2, a3 = a
    I1, I2, I3 = I
    q2, q3 = q[..., 1], q[..., 2]
    c2, s2 = np.cos(q2), np.sin(q2)
    c3, s3 = np.cos(q3), np.sin(q3)
    ck, sk = np.cos(q3 - q2), np.sin(q3 - q2)
    w1, w2, w3 = qd[..., 0], qd[..., 1], qd[..., 2]
    b1, b2, b3 = qdd[..., 0], qdd[..., 1], qdd[..., 2]

    r2 = l1 + a2 * c2
    r3 = l1 + l2 * c2 + a3 * ck
    m11 = m1 * a1 * a1 + I1 + m2 * r2 * r2 + m3 * r3 * r3
    m22 = m2 * a2 * a2 + I2 + m3 * (l2 * l2 + a3 * a3 + 2.0 * l2 * a3 * c3)
    m23 = -m3 * (l2 * a3 * c3 + a3 * a3)
    m33 = m3 * a3 * a3 + I3
    # Partial derivatives of the mass matrix (only q2, q3 dependence).
    d11_2 = -2.0 * m2 * r2 * a2 * s2 + 2.0 * m3 * r3 * (a3 * sk - l2 * s2)
    d11_3 = -2.0 * m3 * r3 * a3 * sk
    d22_3 = -2.0 * m3 * l2 * a3 * s3
    d23_3 = m3 * l2 * a3 * s3

    tau = np.empty(np.broadcast(q2, w1, b1).shape + (3,))
    tau[..., 0] = m11 * b1 + d11_2 * w1 * w2 + d11_3 * w1 * w3
    tau[..., 1] = (
        m22 * b2 + m23 * b3
        + d22_3 * w2 * w3 + d23_3 * w3 * w3 - 0.5 * d11_2 * w1 * w1
        + g * (m2 * a2 * c2 + m3 * (l2 * c2 + a3 * ck))
    )
    tau[..., 2] = (
        m23 * b2 + m33 * b3
        - 0.5 * d11_3 * w1 * w1 - 0.5 * d22_3 * w2 * w2
        - g * m3 * a3 * ck
    )
    return tau


_PROBE_ACC = np.vstack([np.zeros(3), np.eye(3), np.zeros(3)])


def _accel_numpy(l, m, a, I, g, q, qd, tau):
    # One batched call: bias (with rate and gravity), three unit-acceleration
    # probes and their zero-acceleration reference (no rate, no gravity).
    rates = np.zeros((5, 3))
    rates[0] = qd
    grav = np.array([g, 0.0, 0.0, 0.0, 0.0])
    out = inverse_dynamics_numpy(l, m, a, I, grav, q, rates, _PROBE_ACC)
    M = (out[1:4] - out[4]).T
    r = tau - out[0]
    return _cholesky_solve3(M.tolist(), r.tolist())


def _cholesky_solve3(M, r):
    scale = max(M[0][0], M[1][1], M[2][2])
    if not scale > 0:
        return None
    tol = PIVOT_RTOL * scale
    d0 = M[0][0]
    if not d0 > tol:
        return None
    L00 = math.sqrt(d0)
    L10 = M[1][0] / L00
    L20 = M[2][0] / L00
    d1 = M[1][1] - L10 * L10
    if not d1 > tol:
        return None
    L11 = math.sqrt(d1)
    L21 = (M[2][1] - L20 * L10) / L11
    d2 = M[2][2] - L20 * L20 - L21 * L21
    if not d2 > tol:
        return None
    L22 = math.sqrt(d2)
    y0 = r[0] / L00
    y1 = (r[1] - L10 * y0) / L11
    y2 = (r[2] - L20 * y0 - L21 * y1) / L22
    x2 = y2 / L22
    x1 = (y1 - L21 * x2) / L11
    x0 = (y0 - L10 * x1 - L20 * x2) / L00
    return np.array([x0, x1, x2])


def rk4_numpy(l, m, a, I, g, tau_half, q0, qd0, dt, nsteps):
    q = np.empty((nsteps + 1, 3))
    qd = np.empty((nsteps + 1, 3))
    q[0] = q0
    qd[0] = qd0

    def accel(qq, ww, tau):
        return _accel_numpy(l, m, a, I, g, qq, ww, tau)

    for k in range(nsteps):
        x, v = q[k], qd[k]
        t0, th, t1 = tau_half[2 * k], tau_half[2 * k + 1], tau_half[2 * k + 2]
        a1 = accel(x, v, t0)
        if a1 is None:
            return q, qd, STATUS_SINGULAR, k
        a2 = accel(x + 0.5 * dt * v, v + 0.5 * dt * a1, th)
        if a2 is None:
            return q, qd, STATUS_SINGULAR, k
        v2 = v + 0.5 * dt * a1
        a3 = accel(x + 0.5 * dt * v2, v + 0.5 * dt * a2, th)
        if a3 is None:
            return q, qd, STATUS_SINGULAR, k
        v3 = v + 0.5 * dt * a2
        a4 = accel(x + dt * v3, v + dt * a3, t1)
        if a4 is None:
            return q, qd, STATUS_SINGULAR, k
        v4 = v + dt * a3
        q[k + 1] = x + dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4)
        qd[k + 1] = v + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        if not np.all(np.abs(qd[k + 1]) < OMEGA_LIMIT):
            return q, qd, STATUS_UNSTABLE, k + 1
    return q, qd, STATUS_OK, nsteps


# --------------------------------------------------------------------------
# numba path
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _id_point(l, m, a, I, g, q, qd, qdd, out):
    l1 = l[0]
    l2 = l[1]
    m1 = m[0]
    m2 = m[1]
    m3 = m[2]
    a1 = a[0]
    a2 = a[1]
    a3 = a[2]
    c2 = math.cos(q[1])
    s2 = math.sin(q[1])
    c3 = math.cos(q[2])
    s3 = math.sin(q[2])
    ck = math.cos(q[2] - q[1])
    sk = math.sin(q[2] - q[1])
    w1 = qd[0]
    w2 = qd[1]
    w3 = qd[2]

    r2 = l1 + a2 * c2
    r3 = l1 + l2 * c2 + a3 * ck
    m11 = m1 * a1 * a1 + I[0] + m2 * r2 * r2 + m3 * r3 * r3
    m22 = m2 * a2 * a2 + I[1] + m3 * (l2 * l2 + a3 * a3 + 2.0 * l2 * a3 * c3)
    m23 = -m3 * (l2 * a3 * c3 + a3 * a3)
    m33 = m3 * a3 * a3 + I[2]
    d11_2 = -2.0 * m2 * r2 * a2 * s2 + 2.0 * m3 * r3 * (a3 * sk - l2 * s2)
    d11_3 = -2.0 * m3 * r3 * a3 * sk
    d22_3 = -2.0 * m3 * l2 * a3 * s3
    d23_3 = m3 * l2 * a3 * s3

    out[0] = m11 * qdd[0] + d11_2 * w1 * w2 + d11_3 * w1 * w3
    out[1] = (
        m22 * qdd[1] + m23 * qdd[2]
        + d22_3 * w2 * w3 + d23_3 * w3 * w3 - 0.5 * d11_2 * w1 * w1
        + g * (m2 * a2 * c2 + m3 * (l2 * c2 + a3 * ck))
    )
    out[2] = (
        m23 * qdd[1] + m33 * qdd[2]
        - 0.5 * d11_3 * w1 * w1 - 0.5 * d22_3 * w2 * w2
        - g * m3 * a3 * ck
    )


@njit(cache=True, nogil=True)
def inverse_dynamics_numba(l, m, a, I, g, q, qd, qdd):
    n = q.shape[0]
    tau = np.empty((n, 3))
    for i in range(n):
        _id_point(l, m, a, I, g, q[i], qd[i], qdd[i], tau[i])
    return tau


@njit(cache=True, nogil=True)
def _accel_point(l, m, a, I, g, q, qd, tau, M, work, acc):
    """Forward-dynamics acceleration into ``acc``; returns False if M is not SPD."""
    zero = np.zeros(3)
    unit = np.zeros(3)
    _id_point(l, m, a, I, 0.0, q, zero, zero, work)
    z0 = work[0]
    z1 = work[1]
    z2 = work[2]
    for k in range(3):
        unit[:] = 0.0
        unit[k] = 1.0
        _id_point(l, m, a, I, 0.0, q, zero, unit, work)
        M[0, k] = work[0] - z0
        M[1, k] = work[1] - z1
        M[2, k] = work[2] - z2
    _id_point(l, m, a, I, g, q, qd, zero, work)
    r0 = tau[0] - work[0]
    r1 = tau[1] - work[1]
    r2 = tau[2] - work[2]

    scale = max(M[0, 0], max(M[1, 1], M[2, 2]))
    if not scale > 0.0:
        return False
    tol = PIVOT_RTOL * scale
    # 3x3 Cholesky, symmetrized from the lower triangle.
    d0 = M[0, 0]
    if not d0 > tol:
        return False
    L00 = math.sqrt(d0)
    L10 = M[1, 0] / L00
    L20 = M[2, 0] / L00
    d1 = M[1, 1] - L10 * L10
    if not d1 > tol:
        return False
    L11 = math.sqrt(d1)
    L21 = (M[2, 1] - L20 * L10) / L11
    d2 = M[2, 2] - L20 * L20 - L21 * L21
    if not d2 > tol:
        return False
    L22 = math.sqrt(d2)
    y0 = r0 / L00
    y1 = (r1 - L10 * y0) / L11
    y2 = (r2 - L20 * y0 - L21 * y1) / L22
    acc[2] = y2 / L22
    acc[1] = (y1 - L21 * acc[2]) / L11
    acc[0] = (y0 - L10 * acc[1] - L20 * acc[2]) / L00
    return True


@njit(cache=True, nogil=True)
def rk4_numba(l, m, a, I, g, tau_half, q0, qd0, dt, nsteps):
    q = np.empty((nsteps + 1, 3))
    qd = np.empty((nsteps + 1, 3))
    q[0] = q0
    qd[0] = qd0
    M = np.empty((3, 3))
    work = np.empty(3)
    k1 = np.empty(3)
    k2 = np.empty(3)
    k3 = np.empty(3)
    k4 = np.empty(3)
    xs = np.empty(3)
    vs = np.empty(3)
    v2 = np.empty(3)
    v3 = np.empty(3)
    v4 = np.empty(3)
    for k in range(nsteps):
        x = q[k]
        v = qd[k]
        if not _accel_point(l, m, a, I, g, x, v, tau_half[2 * k], M, work, k1):
            return q, qd, STATUS_SINGULAR, k
        for j in range(3):
            v2[j] = v[j] + 0.5 * dt * k1[j]
            xs[j] = x[j] + 0.5 * dt * v[j]
        if not _accel_point(l, m, a, I, g, xs, v2, tau_half[2 * k + 1], M, work, k2):
            return q, qd, STATUS_SINGULAR, k
        for j in range(3):
            v3[j] = v[j] + 0.5 * dt * k2[j]
            xs[j] = x[j] + 0.5 * dt * v2[j]
        if not _accel_point(l, m, a, I, g, xs, v3, tau_half[2 * k + 1], M, work, k3):
            return q, qd, STATUS_SINGULAR, k
        for j in range(3):
            v4[j] = v[j] + dt * k3[j]
            xs[j] = x[j] + dt * v3[j]
        if not _accel_point(l, m, a, I, g, xs, v4, tau_half[2 * k + 2], M, work, k4):
            return q, qd, STATUS_SINGULAR, k
        unstable = False
        for j in range(3):
            q[k + 1, j] = x[j] + dt / 6.0 * (v[j] + 2.0 * v2[j] + 2.0 * v3[j] + v4[j])
            qd[k + 1, j] = v[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            if not abs(qd[k + 1, j]) < OMEGA_LIMIT:
                unstable = True
        if unstable:
            return q, qd, STATUS_UNSTABLE, k + 1
    return q, qd, STATUS_OK, nsteps


def _as_batch(fn):
    def wrapper(l, m, a, I, g, q, qd, qdd):
        q = np.ascontiguousarray(q, dtype=np.float64)
        qd = np.ascontiguousarray(qd, dtype=np.float64)
        qdd = np.ascontiguousarray(qdd, dtype=np.float64)
        shape = np.broadcast_shapes(q.shape, qd.shape, qdd.shape)
        q2 = np.broadcast_to(q, shape).reshape(-1, 3)
        qd2 = np.broadcast_to(qd, shape).reshape(-1, 3)
        qdd2 = np.broadcast_to(qdd, shape).reshape(-1, 3)
        tau = fn(
            np.asarray(l, dtype=np.float64), np.asarray(m, dtype=np.float64),
            np.asarray(a, dtype=np.float64), np.asarray(I, dtype=np.float64), float(g),
            np.ascontiguousarray(q2), np.ascontiguousarray(qd2), np.ascontiguousarray(qdd2),
        )
        return tau.reshape(shape)

    wrapper.__name__ = fn.__name__
    return wrapper


inverse_dynamics_numba_batch = _as_batch(inverse_dynamics_numba)

if USE_NUMBA:
    inverse_dynamics_batch = inverse_dynamics_numba_batch
    rk4_integrate = rk4_numba
else:
    inverse_dynamics_batch = inverse_dynamics_numpy
    rk4_integrate = rk4_numpy
