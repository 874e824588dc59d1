"""Compiled inner loops for the second-order propagators.

Both kernels integrate u'' + q(theta) u = 0 on a uniform grid.  The Numerov
loop works on the transformed variable w = (1 + h^2 q/12) u and accumulates
increments with Kahan compensation; this keeps the roundoff growth of long
runs near the sqrt(N) floor instead of the N^(3/2) random walk of the naive
three-term recurrence.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def numerov_kernel(q, h, u0, u1, cap):
    """Propagate with the Numerov recurrence.

    Returns (u, idx): idx is -1 on success, otherwise the first index where
    |u| exceeded cap (samples beyond it are unreliable).
    """
    n = q.shape[0]
    u = np.empty(n)
    u[0] = u0
    u[1] = u1
    h2 = h * h
    w_prev = (1.0 + h2 * q[0] / 12.0) * u0
    w_cur = (1.0 + h2 * q[1] / 12.0) * u1
    s = w_cur - w_prev
    cs = 0.0
    cw = 0.0
    for i in range(1, n - 1):
        y = -h2 * q[i] * u[i] - cs
        t = s + y
        cs = (t - s) - y
        s = t
        y = s - cw
        t = w_cur + y
        cw = (t - w_cur) - y
        w_cur = t
        val = w_cur / (1.0 + h2 * q[i + 1] / 12.0)
        u[i + 1] = val
        if np.abs(val) > cap:
            return u, i + 1
    return u, -1


@njit(cache=True)
def numerov_scan_kernel(q, h, u0, u1):
    """Numerov sweep with periodic renormalization; never overflows.

    Counts sign changes of the interior samples (endpoints excluded) and
    returns (sign_changes, last3, n_rescales) where last3 holds the final
    three samples in the running scale and n_rescales is how many times the
    solution was scaled down by 1e100.  Signs and ratios of neighbouring
    samples are unaffected by the rescaling.
    """
    n = q.shape[0]
    h2 = h * h
    t0 = 0.0     # u[i-2]
    t1 = u0      # u[i-1]
    t2 = u1      # u[i]
    w_prev = (1.0 + h2 * q[0] / 12.0) * u0
    w_cur = (1.0 + h2 * q[1] / 12.0) * u1
    s = w_cur - w_prev
    cs = 0.0
    cw = 0.0
    nresc = 0
    changes = 0
    last_sign = 0
    if t2 > 0.0:
        last_sign = 1
    elif t2 < 0.0:
        last_sign = -1
    for i in range(1, n - 1):
        y = -h2 * q[i] * t2 - cs
        t = s + y
        cs = (t - s) - y
        s = t
        y = s - cw
        t = w_cur + y
        cw = (t - w_cur) - y
        w_cur = t
        u_new = w_cur / (1.0 + h2 * q[i + 1] / 12.0)
        if i + 1 < n - 1:   # interior sample
            if u_new > 0.0:
                if last_sign < 0:
                    changes += 1
                last_sign = 1
            elif u_new < 0.0:
                if last_sign > 0:
                    changes += 1
                last_sign = -1
        if np.abs(u_new) > 1e100:
            u_new *= 1e-100
            t0 *= 1e-100
            t1 *= 1e-100
            t2 *= 1e-100
            w_cur *= 1e-100
            s *= 1e-100
            cs *= 1e-100
            cw *= 1e-100
            nresc += 1
        t0 = t1
        t1 = t2
        t2 = u_new
    out = np.empty(3)
    out[0] = t0
    out[1] = t1
    out[2] = t2
    return changes, out, nresc


@njit(cache=True)
def rk4_kernel(q_half, h, u0, du0, cap):
    """Classical RK4 on the first-order system (u, u')' = (u', -q u).

    q_half holds q on the half-step lattice: q_half[2*i] at node i,
    q_half[2*i + 1] at the midpoint between nodes i and i+1.
    """
    n = (q_half.shape[0] + 1) // 2
    u = np.empty(n)
    du = np.empty(n)
    u[0] = u0
    du[0] = du0
    y = u0
    v = du0
    for i in range(n - 1):
        qa = q_half[2 * i]
        qm = q_half[2 * i + 1]
        qb = q_half[2 * i + 2]
        k1y = v
        k1v = -qa * y
        k2y = v + 0.5 * h * k1v
        k2v = -qm * (y + 0.5 * h * k1y)
        k3y = v + 0.5 * h * k2v
        k3v = -qm * (y + 0.5 * h * k2y)
        k4y = v + h * k3v
        k4v = -qb * (y + h * k3y)
        y = y + h * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
        v = v + h * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        u[i + 1] = y
        du[i + 1] = v
        if np.abs(y) > cap or np.abs(v) > cap:
            return u, du, i + 1
    return u, du, -1
