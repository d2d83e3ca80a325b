"""Pure-numpy backward sweep; reference implementation of the DP kernel.

The compiled extension in ``_dpcore.pyx`` evaluates the same recurrence
with identical arithmetic ordering and tolerances, so both kernels return
the same arrays. Keep the two in sync.
"""

from __future__ import annotations

import numpy as np

EPS = 1e-9   # SOC-window admissibility slack, % SOC
WSNAP = 1e-9  # interpolation weights within this of a node snap onto it


def _interp_layer(j_next: np.ndarray, succ: np.ndarray, lo: float,
                  step: float, m: int) -> np.ndarray:
    """Inf-aware linear interpolation of one cost layer at ``succ``.
    Callers guarantee succ within [lo, lo + (m-1)*step] up to EPS."""
    p = np.clip((succ - lo) / step, 0.0, float(m - 1))
    j = np.minimum(p.astype(np.int64), m - 2)
    w = p - j
    left = j_next[j]
    right = j_next[j + 1]
    out = np.full(succ.shape, np.inf)
    snap_l = w < WSNAP
    snap_r = w > 1.0 - WSNAP
    out[snap_l] = left[snap_l]
    out[snap_r] = right[snap_r]
    mid = ~snap_l & ~snap_r & np.isfinite(left) & np.isfinite(right)
    out[mid] = left[mid] + w[mid] * (right[mid] - left[mid])
    return out


def backward_sweep(d: np.ndarray, grid: np.ndarray, deltas: np.ndarray,
                   fuel: np.ndarray, obd_drain: float, soc_min: float,
                   soc_max: float, gate_max_delta: float,
                   terminal_threshold: float) -> tuple[np.ndarray, np.ndarray]:
    """Backward induction over the SOC grid.

    Transition: succ = soc + delta - d_k, minus the OBD drain on the null
    decision; net-regeneration intervals are curtailed at soc_max. Positive
    decisions are gated off wherever soc + gate_max_delta would exceed
    soc_max; transitions leaving the window are inadmissible. Ties keep the
    lowest decision index.

    Returns (cost_to_go (N+1, M), decision_idx (N, M)).
    """
    n = d.size
    m = grid.size
    step = (soc_max - soc_min) / (m - 1)
    cost_to_go = np.full((n + 1, m), np.inf)
    policy = np.zeros((n, m), dtype=np.int32)
    cost_to_go[n, grid >= terminal_threshold - 1e-12] = 0.0
    gate_ok = grid + gate_max_delta <= soc_max + EPS

    for k in range(n - 1, -1, -1):
        j_next = cost_to_go[k + 1]
        best = np.full(m, np.inf)
        best_idx = np.zeros(m, dtype=np.int32)
        for a in range(deltas.size):
            delta = float(deltas[a])
            drain = obd_drain if delta == 0.0 else 0.0
            succ = grid + delta - d[k] - drain
            if d[k] < 0.0:
                succ = np.minimum(succ, soc_max)
            ok = (succ >= soc_min - EPS) & (succ <= soc_max + EPS)
            if delta > 0.0:
                ok &= gate_ok
            cost = np.full(m, np.inf)
            if ok.any():
                cost[ok] = fuel[a] + _interp_layer(j_next, succ[ok], soc_min, step, m)
            better = cost < best
            best = np.where(better, cost, best)
            best_idx = np.where(better, np.int32(a), best_idx)
        cost_to_go[k] = best
        policy[k] = best_idx
    return cost_to_go, policy
