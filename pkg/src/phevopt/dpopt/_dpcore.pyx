# Compiled backward sweep. Mirrors _kernel_py.backward_sweep exactly:
# identical arithmetic ordering, tolerances, and tie-breaking, so the two
# kernels return identical arrays. Keep in sync with the Python version.

from libc.math cimport INFINITY, isfinite

import numpy as np

cdef double EPS = 1e-9
cdef double WSNAP = 1e-9


def backward_sweep(double[::1] d, double[::1] grid, double[::1] deltas,
                   double[::1] fuel, double obd_drain, double soc_min,
                   double soc_max, double gate_max_delta,
                   double terminal_threshold):
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t m = grid.shape[0]
    cdef Py_ssize_t n_dec = deltas.shape[0]
    cdef double step = (soc_max - soc_min) / (m - 1)

    cost_np = np.full((n + 1, m), np.inf)
    policy_np = np.zeros((n, m), dtype=np.int32)
    cdef double[:, ::1] cost = cost_np
    cdef int[:, ::1] policy = policy_np

    cdef Py_ssize_t i, k, a, j
    cdef double dk, delta, drain, succ, p, w, left, right, val, best
    cdef int best_idx
    cdef bint gate_ok

    for i in range(m):
        if grid[i] >= terminal_threshold - 1e-12:
            cost[n, i] = 0.0

    for k in range(n - 1, -1, -1):
        dk = d[k]
        for i in range(m):
            best = INFINITY
            best_idx = 0
            gate_ok = grid[i] + gate_max_delta <= soc_max + EPS
            for a in range(n_dec):
                delta = deltas[a]
                if delta > 0.0 and not gate_ok:
                    continue
                drain = obd_drain if delta == 0.0 else 0.0
                succ = grid[i] + delta - dk - drain
                if dk < 0.0 and succ > soc_max:
                    succ = soc_max
                if succ < soc_min - EPS or succ > soc_max + EPS:
                    continue
                p = (succ - soc_min) / step
                if p < 0.0:
                    p = 0.0
                elif p > m - 1:
                    p = m - 1
                j = <Py_ssize_t> p
                if j > m - 2:
                    j = m - 2
                w = p - j
                left = cost[k + 1, j]
                right = cost[k + 1, j + 1]
                if w < WSNAP:
                    val = left
                elif w > 1.0 - WSNAP:
                    val = right
                elif isfinite(left) and isfinite(right):
                    val = left + w * (right - left)
                else:
                    val = INFINITY
                val = fuel[a] + val
                if val < best:
                    best = val
                    best_idx = <int> a
            cost[k, i] = best
            policy[k, i] = best_idx
    return cost_np, policy_np
