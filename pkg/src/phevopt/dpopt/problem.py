"""Problem types for the charge-sustaining optimization.

The CS phase is a finite-horizon problem: the state is SOC, one decision is
taken per interval (default 10 s) from a quantized set of gen-set charge
increments, and the exogenous drain per interval comes from the driving
load. Costs are kWh of fuel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..cycle import DriveCycle
from ..dynamics import VehicleParams, wheel_power_series
from ..powertrain import (
    BatteryParams,
    DrivetrainParams,
    EfficiencyMap,
    PowertrainAssembly,
    current_from_power,
    motor_electrical_power,
)

SOC_EPS = 1e-9  # admissibility slack on SOC-window comparisons

#: Quantized charge increments of the default decision set, % SOC per
#: 10-s interval.
DEFAULT_DELTAS = (0.051, 0.294, 0.567)


@dataclass(frozen=True)
class Decision:
    """One gen-set decision: SOC charged per interval at a fuel-to-
    electricity efficiency. ``delta_soc == 0`` is the null (engine off)
    decision; its efficiency is unused."""

    delta_soc: float        # % per interval
    efficiency_pct: float
    label: str

    def __post_init__(self) -> None:
        if self.delta_soc < 0:
            raise ValueError("decision delta must be nonnegative")
        if not (0.0 < self.efficiency_pct <= 100.0):
            raise ValueError("decision efficiency must lie in (0, 100]")


def null_decision() -> Decision:
    return Decision(0.0, 100.0, "null")


@dataclass(frozen=True)
class TerminalRule:
    """Final-SOC requirement: the terminal cost is 0 at or above the
    resolved threshold and infinite below it."""

    kind: str  # "threshold" | "initial" | "soc_min"
    value: float | None = None

    @classmethod
    def at(cls, soc: float) -> "TerminalRule":
        return cls("threshold", float(soc))

    @classmethod
    def initial(cls) -> "TerminalRule":
        """Charge-sustaining neutrality: end at or above the starting SOC."""
        return cls("initial")

    @classmethod
    def at_soc_min(cls) -> "TerminalRule":
        return cls("soc_min")

    def resolve(self, cfg: "DpConfig") -> float:
        if self.kind == "threshold":
            assert self.value is not None
            return self.value
        if self.kind == "initial":
            if cfg.initial_soc is None:
                raise ValueError(
                    "terminal rule 'initial' needs cfg.initial_soc to be set")
            return cfg.initial_soc
        if self.kind == "soc_min":
            return cfg.soc_min
        raise ValueError(f"unknown terminal rule kind {self.kind!r}")


def max_delta_bound(p_genset_max_kw: float, dt_s: float, c_batt_kwh: float) -> float:
    """Largest admissible charge increment, % SOC per interval, for a
    gen-set electrical peak: P*dt converted to a fraction of capacity."""
    return p_genset_max_kw * dt_s / (3600.0 * c_batt_kwh) * 100.0


def delta_to_electrical_kw(delta_soc: float, dt_s: float, c_batt_kwh: float) -> float:
    """Electrical power that sustains a charge increment over one interval."""
    return delta_soc / 100.0 * c_batt_kwh * 3600.0 / dt_s


@dataclass
class DpConfig:
    """Configuration of the CS optimization."""

    dt_s: float = 10.0
    soc_min: float = 12.0
    soc_max: float = 17.0
    grid_step: float = 0.01
    decisions: tuple[Decision, ...] = ()
    terminal_rule: TerminalRule = field(default_factory=TerminalRule.initial)
    obd_enabled: bool = False
    obd_energy_per_event_kwh: float = 0.00497
    c_batt_kwh: float = 18.9
    p_genset_max_kw: float = 40.0
    initial_soc: float | None = None

    def __post_init__(self) -> None:
        if self.dt_s <= 0:
            raise ValueError("dt must be positive")
        if self.soc_min >= self.soc_max:
            raise ValueError("soc_min must be below soc_max")
        if self.grid_step <= 0 or self.grid_step > (self.soc_max - self.soc_min):
            raise ValueError("grid_step must lie in (0, soc_max - soc_min]")
        if self.obd_energy_per_event_kwh < 0:
            raise ValueError("OBD energy per event must be nonnegative")
        if self.c_batt_kwh <= 0:
            raise ValueError("battery capacity must be positive")
        if not self.decisions:
            raise ValueError("decision set must not be empty")
        if not any(dec.delta_soc == 0.0 for dec in self.decisions):
            raise ValueError("decision set must include the null decision")
        bound = max_delta_bound(self.p_genset_max_kw, self.dt_s, self.c_batt_kwh)
        for dec in self.decisions:
            if dec.delta_soc > bound + SOC_EPS:
                raise ValueError(
                    f"decision {dec.label!r} charges {dec.delta_soc:.4f}%/interval, "
                    f"beyond the gen-set peak bound {bound:.4f}%")
        if self.initial_soc is not None and not (
                self.soc_min <= self.initial_soc <= self.soc_max):
            raise ValueError("initial_soc must lie inside the SOC window")

    @property
    def n_states(self) -> int:
        return int(round((self.soc_max - self.soc_min) / self.grid_step)) + 1

    def grid(self) -> np.ndarray:
        return np.linspace(self.soc_min, self.soc_max, self.n_states)

    @property
    def max_positive_delta(self) -> float:
        positives = [dec.delta_soc for dec in self.decisions if dec.delta_soc > 0]
        return max(positives) if positives else 0.0

    @property
    def obd_drain_pct(self) -> float:
        """SOC drawn by one OBD event, % of capacity."""
        return self.obd_energy_per_event_kwh / self.c_batt_kwh * 100.0

    def delta_array(self) -> np.ndarray:
        return np.asarray([dec.delta_soc for dec in self.decisions], dtype=float)

    def fuel_array(self) -> np.ndarray:
        """Stage cost of each decision in kWh fuel: charged energy divided
        by the decision's fuel-to-electricity efficiency; 0 for null."""
        out = []
        for dec in self.decisions:
            if dec.delta_soc == 0.0:
                out.append(0.0)
            else:
                out.append((dec.delta_soc / 100.0 * self.c_batt_kwh)
                           / (dec.efficiency_pct / 100.0))
        return np.asarray(out, dtype=float)


def default_decisions(assembly: PowertrainAssembly, cfg_or_capacity,
                      dt_s: float = 10.0,
                      genset_speed_rpm: float = 2600.0,
                      deltas: Sequence[float] = DEFAULT_DELTAS) -> tuple[Decision, ...]:
    """Default decision table: the null decision plus the quantized charge
    increments, all at the efficiency of the single gen-set operating point
    sized for the largest increment (smaller increments duty-cycle that
    same point within the interval)."""
    c_batt = getattr(cfg_or_capacity, "c_batt_kwh", cfg_or_capacity)
    biggest = max(deltas)
    point = assembly.genset_point(genset_speed_rpm,
                                  delta_to_electrical_kw(biggest, dt_s, c_batt))
    decs = [null_decision()]
    for delta in sorted(deltas):
        decs.append(Decision(delta, point.combined_efficiency_pct, f"b{delta:g}"))
    return tuple(decs)


@dataclass
class DemandProfile:
    """Per-interval SOC drain from the driving load, % per interval.
    Negative entries are net-regeneration intervals."""

    d_pct: np.ndarray
    dt_s: float
    distance_km: float

    def __post_init__(self) -> None:
        self.d_pct = np.asarray(self.d_pct, dtype=float)
        if self.d_pct.ndim != 1 or self.d_pct.size < 1:
            raise ValueError("demand profile needs at least one interval")
        if not np.all(np.isfinite(self.d_pct)):
            raise ValueError("demand entries must be finite")
        if self.dt_s <= 0 or self.distance_km < 0:
            raise ValueError("dt must be positive and distance nonnegative")

    @property
    def n_intervals(self) -> int:
        return self.d_pct.size


def build_demand(cycle: DriveCycle, vp: VehicleParams, motor_map: EfficiencyMap,
                 drv: DrivetrainParams, bp: BatteryParams,
                 calibration: float = 1.0, dt_s: float = 10.0,
                 regen_current_limit_a: float | None = None,
                 reference_soc: float = 50.0) -> DemandProfile:
    """Convert a drive cycle into the per-interval battery drain the CS
    optimization consumes.

    Each sample's wheel power (scaled by the calibration factor) passes
    through the motor map to electrical power and through the terminal-power
    inversion to current; the chemistry power V_oc*I is integrated per
    interval. A partial trailing interval is folded into the last full one.
    Regeneration current is clipped at ``regen_current_limit_a`` when given.
    ``reference_soc`` selects the open-circuit voltage used for the
    power-to-current conversion (the drain profile is SOC-independent by
    construction).
    """
    if calibration <= 0:
        raise ValueError("calibration must be positive")
    if cycle.duration_s < dt_s:
        raise ValueError("cycle must span at least one decision interval")
    p_wheel = wheel_power_series(vp, cycle) * calibration
    v_oc = bp.v_oc(reference_soc)
    p_chem = np.empty_like(p_wheel)
    for idx in range(p_wheel.size):
        p_elec = motor_electrical_power(motor_map, drv, cycle.v_mps[idx], p_wheel[idx])
        i_amps = current_from_power(bp, reference_soc, p_elec)
        if regen_current_limit_a is not None and i_amps < -regen_current_limit_a:
            i_amps = -regen_current_limit_a
        p_chem[idx] = v_oc * i_amps / 1000.0

    t = cycle.t_s
    cum_kws = np.concatenate(
        [[0.0], np.cumsum(0.5 * (p_chem[1:] + p_chem[:-1]) * np.diff(t))])
    n = int(math.floor(cycle.duration_s / dt_s + 1e-9))
    bounds = t[0] + dt_s * np.arange(n + 1)
    bounds[-1] = t[-1]  # fold the partial trailing interval into the last one
    cum_at = np.interp(bounds, t, cum_kws)
    energy_kwh = np.diff(cum_at) / 3600.0
    return DemandProfile(d_pct=energy_kwh / bp.c_batt_kwh * 100.0,
                         dt_s=dt_s, distance_km=cycle.distance_km)


@dataclass
class DpPolicy:
    """Backward-induction output: optimal cost-to-go and the minimizing
    decision index on the SOC grid for every interval."""

    cost_to_go: np.ndarray      # (N+1, M) kWh fuel
    decision_idx: np.ndarray    # (N, M) index into `decisions`
    grid: np.ndarray            # (M,) SOC %
    decisions: tuple[Decision, ...]
    terminal_soc: float

    @property
    def n_intervals(self) -> int:
        return self.decision_idx.shape[0]

    def interp_cost(self, k: int, soc: float) -> float:
        """Cost-to-go at stage k and an off-grid SOC (inf-aware linear
        interpolation)."""
        grid = self.grid
        if soc <= grid[0]:
            return float(self.cost_to_go[k, 0])
        if soc >= grid[-1]:
            return float(self.cost_to_go[k, -1])
        j = int(np.searchsorted(grid, soc, side="right")) - 1
        w = (soc - grid[j]) / (grid[j + 1] - grid[j])
        left = self.cost_to_go[k, j]
        right = self.cost_to_go[k, j + 1]
        if w < 1e-9:
            return float(left)
        if w > 1.0 - 1e-9:
            return float(right)
        if not (np.isfinite(left) and np.isfinite(right)):
            return math.inf
        return float(left + w * (right - left))

    def optimal_cost(self, initial_soc: float) -> float:
        return self.interp_cost(0, initial_soc)
