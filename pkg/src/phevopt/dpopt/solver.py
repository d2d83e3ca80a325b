"""Backward-DP solver and forward rollout for the CS problem.

The backward sweep runs on one of two interchangeable kernels: a compiled
extension (built from ``_dpcore.pyx``) and a pure-numpy fallback. The
extension is preferred when importable; override with the
``PHEVOPT_KERNEL`` environment variable or the ``kernel=`` argument.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import InfeasibleProblemError, ToleranceBreachError
from . import _kernel_py
from .problem import DemandProfile, DpConfig, DpPolicy

try:
    from . import _dpcore
except ImportError:
    _dpcore = None

HAVE_COMPILED_KERNEL = _dpcore is not None

_KERNELS = {"python": _kernel_py.backward_sweep}
if HAVE_COMPILED_KERNEL:
    _KERNELS["cython"] = _dpcore.backward_sweep


def active_kernel(kernel: str | None = None) -> str:
    """Resolve the kernel name: explicit argument, then PHEVOPT_KERNEL,
    then the compiled extension when present."""
    name = kernel or os.environ.get("PHEVOPT_KERNEL")
    if name is None:
        name = "cython" if HAVE_COMPILED_KERNEL else "python"
    if name not in ("python", "cython"):
        raise ValueError(f"unknown kernel {name!r}; use 'python' or 'cython'")
    if name == "cython" and not HAVE_COMPILED_KERNEL:
        raise RuntimeError("compiled kernel requested but the extension is not built")
    return name


def solve(d: DemandProfile, cfg: DpConfig, kernel: str | None = None) -> DpPolicy:
    """Backward induction over the quantized SOC grid.

    Raises
    ------
    InfeasibleProblemError
        When no admissible decision sequence reaches the terminal set: from
        every grid state when ``cfg.initial_soc`` is unset, or from that
        initial state when it is set. The error names the first interval at
        which the whole grid is unreachable, when one exists.
    """
    threshold = cfg.terminal_rule.resolve(cfg)
    grid = cfg.grid()
    sweep = _KERNELS[active_kernel(kernel)]
    cost_to_go, decision_idx = sweep(
        np.ascontiguousarray(d.d_pct), grid, cfg.delta_array(), cfg.fuel_array(),
        cfg.obd_drain_pct if cfg.obd_enabled else 0.0,
        cfg.soc_min, cfg.soc_max, cfg.max_positive_delta, threshold)
    policy = DpPolicy(cost_to_go=cost_to_go, decision_idx=decision_idx,
                      grid=grid, decisions=cfg.decisions, terminal_soc=threshold)

    if cfg.initial_soc is not None:
        unreachable = not np.isfinite(policy.optimal_cost(cfg.initial_soc))
    else:
        unreachable = not np.isfinite(cost_to_go[0]).any()
    if unreachable:
        stage = None
        for k in range(d.n_intervals, -1, -1):
            if not np.isfinite(cost_to_go[k]).any():
                stage = k
                break
        where = (f"interval {stage} blocks every state"
                 if stage is not None else "the designated initial state")
        raise InfeasibleProblemError(
            f"no admissible decision sequence reaches SOC >= {threshold:.4f}%: "
            f"{where}", stage=stage)
    return policy


@dataclass
class RolloutResult:
    """Forward pass of a solved policy from a concrete initial SOC."""

    soc_trajectory: np.ndarray   # (N+1,) interval-boundary SOC %
    fuel_kwh: float
    cs_ec_wh_per_km: float
    decision_indices: np.ndarray  # (N,)
    null_intervals: int           # intervals with the gen-set off

    @property
    def final_soc(self) -> float:
        return float(self.soc_trajectory[-1])


def rollout(policy: DpPolicy, d: DemandProfile, cfg: DpConfig,
            initial_soc: float) -> RolloutResult:
    """Apply the stored policy forward from ``initial_soc`` with exact
    continuous-SOC transitions (nearest-grid decisions at off-grid states).

    Raises
    ------
    InfeasibleProblemError
        If the initial state has no finite cost-to-go.
    ToleranceBreachError
        If any boundary SOC leaves the window by more than one grid step.
    """
    if not np.isfinite(policy.optimal_cost(initial_soc)):
        raise InfeasibleProblemError(
            f"initial SOC {initial_soc:.4f}% has no feasible path")
    grid = policy.grid
    step = (grid[-1] - grid[0]) / (grid.size - 1)
    n = d.n_intervals
    traj = np.empty(n + 1)
    chosen = np.empty(n, dtype=np.int32)
    soc = float(initial_soc)
    traj[0] = soc
    fuel_arr = cfg.fuel_array()
    obd_drain = cfg.obd_drain_pct if cfg.obd_enabled else 0.0
    fuel = 0.0
    nulls = 0
    for k in range(n):
        i = int(round((soc - grid[0]) / step))
        i = min(max(i, 0), grid.size - 1)
        a = int(policy.decision_idx[k, i])
        chosen[k] = a
        dec = policy.decisions[a]
        if dec.delta_soc == 0.0:
            nulls += 1
            soc = soc - d.d_pct[k] - obd_drain
        else:
            fuel += fuel_arr[a]
            soc = soc + dec.delta_soc - d.d_pct[k]
        if d.d_pct[k] < 0.0 and soc > cfg.soc_max:
            soc = cfg.soc_max
        breach = max(cfg.soc_min - soc, soc - cfg.soc_max)
        if breach > cfg.grid_step + 1e-12:
            raise ToleranceBreachError(
                f"interval {k}: SOC {soc:.4f}% leaves [{cfg.soc_min:g}, "
                f"{cfg.soc_max:g}] by {breach:.4f}% (> grid step {cfg.grid_step:g})")
        traj[k + 1] = soc
    ec = fuel * 1000.0 / d.distance_km if d.distance_km > 0 else 0.0
    return RolloutResult(soc_trajectory=traj, fuel_kwh=fuel,
                         cs_ec_wh_per_km=ec, decision_indices=chosen,
                         null_intervals=nulls)


def write_policy(policy: DpPolicy, path) -> None:
    """Export a policy as CSV rows ``k,soc_grid,decision_label,cost_to_go_kwh``."""
    buf = io.StringIO()
    buf.write("k,soc_grid,decision_label,cost_to_go_kwh\n")
    for k in range(policy.n_intervals):
        row_cost = policy.cost_to_go[k]
        row_idx = policy.decision_idx[k]
        for i, soc in enumerate(policy.grid):
            cost = row_cost[i]
            cost_txt = f"{cost:.9f}" if np.isfinite(cost) else "inf"
            buf.write(f"{k},{soc:.6f},{policy.decisions[int(row_idx[i])].label},"
                      f"{cost_txt}\n")
    Path(path).write_text(buf.getvalue(), encoding="utf-8")
