"""Component models: efficiency maps, gen-set merging, and the battery.

Efficiency maps are node grids over (speed rpm, torque Nm) with NaN marking
the infeasible region outside a component's envelope; lookups are bilinear.
Maps can be built from measured characterization rows, loaded from CSV
matrices, or generated synthetically (the published figures carry no
numeric tables, so the bundled defaults are parameterized stand-ins and are
labeled as such).

The battery is an internal-resistance model: open-circuit voltage from an
SOC-indexed table, terminal power V_oc*I - R*I^2, and SOC integrated from
the chemistry power V_oc*I. Current is discharge-positive.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import (
    CharacterizationDataError,
    EmptyMapError,
    EnvelopeError,
    MapDomainError,
    MapFormatError,
)

RAD_S_PER_RPM = 2.0 * math.pi / 60.0
DEFAULT_LHV_KWH_PER_G = 0.011833  # diesel, 42.6 MJ/kg
DEFAULT_BELT_RATIO = 2.7          # generator speed / engine speed

_W_SNAP = 1e-12  # interpolation weights below this snap onto the node


# ---------------------------------------------------------------------------
# Efficiency maps


@dataclass
class EfficiencyMap:
    """Efficiency in % on a (speed, torque) node grid; NaN = infeasible.

    ``values[i, j]`` is the efficiency at ``speed_axis[i]``,
    ``torque_axis[j]``. Feasible nodes must lie in (0, 100].
    """

    speed_axis: np.ndarray   # rpm, strictly ascending
    torque_axis: np.ndarray  # Nm, strictly ascending
    values: np.ndarray       # %, shape (n_speed, n_torque)
    label: str = ""

    def __post_init__(self) -> None:
        self.speed_axis = np.asarray(self.speed_axis, dtype=float)
        self.torque_axis = np.asarray(self.torque_axis, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        for axis in (self.speed_axis, self.torque_axis):
            if axis.ndim != 1 or axis.size < 2:
                raise ValueError("map axes need at least two points")
            if not np.all(np.diff(axis) > 0):
                raise ValueError("map axes must be strictly ascending")
        if self.values.shape != (self.speed_axis.size, self.torque_axis.size):
            raise ValueError("values shape must be (n_speed, n_torque)")
        finite = self.values[np.isfinite(self.values)]
        if finite.size and (np.any(finite <= 0) or np.any(finite > 100)):
            raise ValueError("feasible map values must lie in (0, 100]")

    @property
    def n_feasible(self) -> int:
        return int(np.isfinite(self.values).sum())


def motor_efficiency(torque_nm: float, omega_rpm: float,
                     volts: float, amps: float) -> float:
    """Motor efficiency in % from one characterization row:
    mechanical output over electrical input."""
    p_elec = volts * amps
    if p_elec <= 0:
        raise ValueError("electrical input power must be positive")
    p_mech = torque_nm * omega_rpm * RAD_S_PER_RPM
    if p_mech < 0:
        raise ValueError("motoring quadrant requires torque*speed >= 0")
    eta = p_mech / p_elec * 100.0
    if eta > 100.0:
        raise CharacterizationDataError(
            f"mechanical power exceeds electrical input (eta = {eta:.2f}%)")
    return eta


def engine_efficiency(bsfc_g_per_kwh: float,
                      lhv_kwh_per_g: float = DEFAULT_LHV_KWH_PER_G) -> float:
    """Engine brake efficiency in % from BSFC and fuel heating value."""
    if bsfc_g_per_kwh <= 0 or lhv_kwh_per_g <= 0:
        raise ValueError("BSFC and LHV must be positive")
    return 100.0 / (bsfc_g_per_kwh * lhv_kwh_per_g)


def generator_efficiency(volts: float, amps: float,
                         torque_nm: float, omega_rpm: float) -> float:
    """Generator efficiency in % from one characterization row:
    electrical output over mechanical input."""
    p_mech = torque_nm * omega_rpm * RAD_S_PER_RPM
    if p_mech <= 0:
        raise ValueError("generating quadrant requires positive torque*speed")
    eta = volts * amps / p_mech * 100.0
    if eta > 100.0:
        raise CharacterizationDataError(
            f"electrical power exceeds mechanical input (eta = {eta:.2f}%)")
    return eta


def _cell(axis: np.ndarray, x: float) -> tuple[int, float]:
    """Enclosing cell index and fractional position, snapped onto nodes."""
    i = int(np.searchsorted(axis, x, side="right")) - 1
    i = min(max(i, 0), axis.size - 2)
    u = (x - axis[i]) / (axis[i + 1] - axis[i])
    if u < _W_SNAP:
        u = 0.0
    elif u > 1.0 - _W_SNAP:
        u = 1.0
    return i, u


def map_lookup(m: EfficiencyMap, speed_rpm: float, torque_nm: float) -> float:
    """Bilinear interpolation of a map; exact at nodes.

    Raises
    ------
    MapDomainError
        When the query lies outside the axis bounding box.
    EnvelopeError
        When any enclosing node that carries interpolation weight is
        infeasible.
    """
    if not (m.speed_axis[0] <= speed_rpm <= m.speed_axis[-1]):
        raise MapDomainError(
            f"speed {speed_rpm:g} rpm outside [{m.speed_axis[0]:g}, {m.speed_axis[-1]:g}]")
    if not (m.torque_axis[0] <= torque_nm <= m.torque_axis[-1]):
        raise MapDomainError(
            f"torque {torque_nm:g} Nm outside [{m.torque_axis[0]:g}, {m.torque_axis[-1]:g}]")
    i, u = _cell(m.speed_axis, speed_rpm)
    j, w = _cell(m.torque_axis, torque_nm)
    v = m.values
    corners = ((v[i, j], (1 - u) * (1 - w)), (v[i + 1, j], u * (1 - w)),
               (v[i, j + 1], (1 - u) * w), (v[i + 1, j + 1], u * w))
    out = 0.0
    for val, weight in corners:
        if weight == 0.0:
            continue
        if not np.isfinite(val):
            raise EnvelopeError(
                f"({speed_rpm:g} rpm, {torque_nm:g} Nm) touches the infeasible "
                f"region of map {m.label!r}")
        out += val * weight
    return out


def max_feasible_torque(m: EfficiencyMap, speed_rpm: float) -> float:
    """Largest torque on the axis for which map_lookup succeeds at this
    speed; 0 if none (never negative)."""
    if not (m.speed_axis[0] <= speed_rpm <= m.speed_axis[-1]):
        raise MapDomainError(f"speed {speed_rpm:g} rpm outside map {m.label!r}")
    i, u = _cell(m.speed_axis, speed_rpm)
    rows = []
    if u < 1.0:
        rows.append(m.values[i])
    if u > 0.0:
        rows.append(m.values[i + 1])
    limit = 0.0
    for j in range(m.torque_axis.size):
        if all(np.isfinite(r[j]) for r in rows):
            limit = float(m.torque_axis[j])
        else:
            break
    return limit


def merge_gen_set(engine_map: EfficiencyMap, gen_map: EfficiencyMap,
                  belt_ratio: float = DEFAULT_BELT_RATIO,
                  belt_efficiency: float = 1.0) -> EfficiencyMap:
    """Combine engine and generator maps into one fuel-to-electricity map.

    The merged map lives on the engine's axes. At each engine node the
    generator is evaluated at (speed * belt_ratio, torque / belt_ratio) and
    the combined efficiency is eta_eng * eta_gen / 100 (times an optional
    belt efficiency). Nodes whose generator point is out of range or
    infeasible become infeasible.
    """
    if belt_ratio <= 0:
        raise ValueError("belt ratio must be positive")
    if not (0 < belt_efficiency <= 1):
        raise ValueError("belt efficiency must lie in (0, 1]")
    values = np.full_like(engine_map.values, np.nan)
    for a, speed in enumerate(engine_map.speed_axis):
        for b, torque in enumerate(engine_map.torque_axis):
            eta_eng = engine_map.values[a, b]
            if not np.isfinite(eta_eng):
                continue
            try:
                eta_gen = map_lookup(gen_map, speed * belt_ratio, torque / belt_ratio)
            except (MapDomainError, EnvelopeError):
                continue
            values[a, b] = eta_eng * eta_gen / 100.0 * belt_efficiency
    if not np.isfinite(values).any():
        raise EmptyMapError(
            f"maps {engine_map.label!r} and {gen_map.label!r} have disjoint "
            f"envelopes through belt ratio {belt_ratio:g}")
    label = f"{engine_map.label}+{gen_map.label}" if engine_map.label else "gen-set"
    return EfficiencyMap(engine_map.speed_axis.copy(), engine_map.torque_axis.copy(),
                         values, label)


# ---------------------------------------------------------------------------
# Map I/O

def load_map(source, label: str | None = None) -> EfficiencyMap:
    """Read a map matrix: first row = torque axis, first column = speed
    axis, body = efficiency %, empty cell = infeasible, ``#`` comments."""
    if hasattr(source, "read"):
        text = source.read()
        name = label or ""
    else:
        path = Path(source)
        text = path.read_text(encoding="utf-8")
        name = label or path.stem
    torque_axis: list[float] | None = None
    speeds: list[float] = []
    body: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if torque_axis is None:
            try:
                torque_axis = [float(p) for p in parts[1:]]
            except ValueError:
                raise MapFormatError(f"line {lineno}: non-numeric torque axis") from None
            continue
        if len(parts) != len(torque_axis) + 1:
            raise MapFormatError(
                f"line {lineno}: expected {len(torque_axis) + 1} fields, got {len(parts)}")
        try:
            speeds.append(float(parts[0]))
            body.append([float(p) if p else math.nan for p in parts[1:]])
        except ValueError:
            raise MapFormatError(f"line {lineno}: non-numeric value") from None
    if torque_axis is None or not body:
        raise MapFormatError("map file has no header row or no body rows")
    try:
        return EfficiencyMap(np.asarray(speeds), np.asarray(torque_axis),
                             np.asarray(body), name)
    except ValueError as exc:
        raise MapFormatError(str(exc)) from None


def save_map(m: EfficiencyMap, path) -> None:
    """Write a map in the matrix format accepted by :func:`load_map`."""
    buf = io.StringIO()
    buf.write("," + ",".join(f"{t:g}" for t in m.torque_axis) + "\n")
    for speed, row in zip(m.speed_axis, m.values):
        cells = ["" if not np.isfinite(x) else f"{x:.4f}" for x in row]
        buf.write(f"{speed:g}," + ",".join(cells) + "\n")
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def load_characterization(source) -> np.ndarray:
    """Read characterization rows ``omega_rpm,T_Nm,V_volts,I_amps``.

    An optional header naming those columns and ``#`` comments are
    accepted. Returns an (n, 4) array.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    rows: list[tuple[float, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if parts == ["omega_rpm", "T_Nm", "V_volts", "I_amps"]:
            continue
        if len(parts) != 4:
            raise MapFormatError(f"line {lineno}: expected 4 fields, got {len(parts)}")
        try:
            rows.append(tuple(float(p) for p in parts))
        except ValueError:
            raise MapFormatError(f"line {lineno}: non-numeric value") from None
    if not rows:
        raise MapFormatError("characterization file has no data rows")
    return np.asarray(rows, dtype=float)


def map_from_characterization(rows, kind: str, label: str = "") -> EfficiencyMap:
    """Build a map from characterization rows.

    ``kind`` selects the efficiency definition: ``"motor"`` (mechanical out
    over electrical in) or ``"generator"`` (electrical out over mechanical
    in). Axes are the unique measured speeds and torques; grid nodes with
    no measurement stay infeasible.
    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != 4:
        raise MapFormatError("characterization rows must be (n, 4)")
    if kind not in ("motor", "generator"):
        raise ValueError("kind must be 'motor' or 'generator'")
    speeds = np.unique(rows[:, 0])
    torques = np.unique(rows[:, 1])
    values = np.full((speeds.size, torques.size), np.nan)
    for omega, torque, volts, amps in rows:
        if kind == "motor":
            eta = motor_efficiency(torque, omega, volts, amps)
        else:
            eta = generator_efficiency(volts, amps, torque, omega)
        a = int(np.searchsorted(speeds, omega))
        b = int(np.searchsorted(torques, torque))
        values[a, b] = eta
    return EfficiencyMap(speeds, torques, values, label or f"characterized-{kind}")


# ---------------------------------------------------------------------------
# Synthetic default maps

def synthetic_motor_map(peak_eta: float = 94.0, max_torque_nm: float = 320.0,
                        max_power_kw: float = 120.0) -> EfficiencyMap:
    """Parameterized traction-motor map: peak efficiency near mid speed and
    mid torque, constant-torque region up to base speed, constant-power
    envelope above. Synthetic stand-in for unmeasured hardware."""
    speed = np.arange(0.0, 10000.1, 500.0)
    torque = np.arange(0.0, max_torque_nm + 0.1, 20.0)
    s_norm = (speed[:, None] - 5000.0) / 5000.0
    t_norm = (torque[None, :] - max_torque_nm / 2.0) / (max_torque_nm / 2.0)
    values = peak_eta * (1.0 - 0.18 * s_norm**2) * (1.0 - 0.12 * t_norm**2)
    power_lim = np.full_like(speed, np.inf)
    nz = speed > 0
    power_lim[nz] = max_power_kw * 1000.0 / (speed[nz] * RAD_S_PER_RPM)
    envelope = np.minimum(max_torque_nm, power_lim[:, None])
    values = np.where(torque[None, :] <= envelope + 1e-9, values, np.nan)
    return EfficiencyMap(speed, torque, values, "synthetic-motor")


def synthetic_engine_map(peak_eta: float = 36.0, max_torque_nm: float = 170.0,
                         max_power_kw: float = 52.0) -> EfficiencyMap:
    """Parameterized diesel-engine map over 800-3600 rpm."""
    speed = np.arange(800.0, 3600.1, 200.0)
    torque = np.arange(0.0, 180.1, 10.0)
    s_norm = (speed[:, None] - 2200.0) / 1400.0
    t_norm = (torque[None, :] - 120.0) / 120.0
    values = peak_eta * (1.0 - 0.10 * s_norm**2) * (1.0 - 0.30 * t_norm**2)
    envelope = np.minimum(max_torque_nm,
                          max_power_kw * 1000.0 / (speed * RAD_S_PER_RPM))[:, None]
    values = np.where(torque[None, :] <= envelope + 1e-9, values, np.nan)
    return EfficiencyMap(speed, torque, values, "synthetic-engine")


def synthetic_generator_map(peak_eta: float = 92.0, max_torque_nm: float = 120.0,
                            max_power_kw: float = 56.0) -> EfficiencyMap:
    """Parameterized generator map over 1000-10000 rpm (belt side)."""
    speed = np.arange(1000.0, 10000.1, 500.0)
    torque = np.arange(0.0, 120.1, 10.0)
    s_norm = (speed[:, None] - 6000.0) / 4000.0
    t_norm = (torque[None, :] - 60.0) / 60.0
    values = peak_eta * (1.0 - 0.06 * s_norm**2) * (1.0 - 0.10 * t_norm**2)
    envelope = np.minimum(max_torque_nm,
                          max_power_kw * 1000.0 / (speed * RAD_S_PER_RPM))[:, None]
    values = np.where(torque[None, :] <= envelope + 1e-9, values, np.nan)
    return EfficiencyMap(speed, torque, values, "synthetic-generator")


def flat_map(eta: float, label: str = "flat") -> EfficiencyMap:
    """Constant-efficiency map over a wide box; useful for linearity tests."""
    speed = np.asarray([0.0, 20000.0])
    torque = np.asarray([0.0, 2000.0])
    return EfficiencyMap(speed, torque, np.full((2, 2), float(eta)), label)


# ---------------------------------------------------------------------------
# Drivetrain and the wheel-to-motor conversion

@dataclass
class DrivetrainParams:
    """Single-speed reduction between motor and wheels."""

    gear_ratio: float = 7.82       # motor revs per wheel rev
    wheel_radius_m: float = 0.3348

    def __post_init__(self) -> None:
        if self.gear_ratio <= 0 or self.wheel_radius_m <= 0:
            raise ValueError("gear ratio and wheel radius must be positive")

    @property
    def rpm_per_mps(self) -> float:
        return self.gear_ratio * 60.0 / (2.0 * math.pi * self.wheel_radius_m)

    def motor_torque_nm(self, force_n: float) -> float:
        return force_n * self.wheel_radius_m / self.gear_ratio


def motor_electrical_power(motor_map: EfficiencyMap, drv: DrivetrainParams,
                           v_mps: float, p_wheel_kw: float,
                           v_min: float = 0.05) -> float:
    """Electrical power at the motor terminals for one wheel operating point.

    Positive wheel power divides by map efficiency; negative wheel power
    (regeneration) multiplies by it, with braking torque clamped to the map
    envelope (the remainder is friction braking). Below ``v_min`` the motor
    is treated as off.

    Raises
    ------
    EnvelopeError
        When a positive demand exceeds the feasible torque at this speed.
    """
    if v_mps < v_min or p_wheel_kw == 0.0:
        return 0.0
    omega_rpm = v_mps * drv.rpm_per_mps
    torque = p_wheel_kw * 1000.0 / (omega_rpm * RAD_S_PER_RPM)
    if p_wheel_kw > 0:
        eta = map_lookup(motor_map, omega_rpm, torque)
        return p_wheel_kw / (eta / 100.0)
    t_max = max_feasible_torque(motor_map, omega_rpm)
    t_regen = min(-torque, t_max)
    if t_regen <= 0:
        return 0.0
    eta = map_lookup(motor_map, omega_rpm, t_regen)
    p_regen_kw = t_regen * omega_rpm * RAD_S_PER_RPM / 1000.0
    return -p_regen_kw * (eta / 100.0)


# ---------------------------------------------------------------------------
# Battery

def flat_voc_curve(volts: float = 340.0) -> np.ndarray:
    """Two-point SOC-to-open-circuit-voltage table at a constant voltage."""
    return np.asarray([[0.0, volts], [100.0, volts]], dtype=float)


@dataclass
class BatteryParams:
    """Internal-resistance battery model parameters."""

    c_batt_kwh: float = 18.9
    r_in_ohm: float = 0.08
    v_oc_curve: np.ndarray = field(default_factory=flat_voc_curve)

    def __post_init__(self) -> None:
        self.v_oc_curve = np.asarray(self.v_oc_curve, dtype=float)
        if self.c_batt_kwh <= 0:
            raise ValueError("battery capacity must be positive")
        if self.r_in_ohm < 0:
            raise ValueError("internal resistance must be nonnegative")
        curve = self.v_oc_curve
        if curve.ndim != 2 or curve.shape[1] != 2 or curve.shape[0] < 2:
            raise ValueError("v_oc_curve must be an (n, 2) table of (soc, volts)")
        if not np.all(np.diff(curve[:, 0]) > 0):
            raise ValueError("v_oc_curve SOC column must be strictly ascending")
        if np.any(np.diff(curve[:, 1]) < 0) or np.any(curve[:, 1] <= 0):
            raise ValueError("open-circuit voltage must be positive and nondecreasing")

    def v_oc(self, soc: float) -> float:
        return float(np.interp(soc, self.v_oc_curve[:, 0], self.v_oc_curve[:, 1]))


class SocResult(NamedTuple):
    soc: float
    clamped: bool


def battery_power(b: BatteryParams, soc: float, i_amps: float) -> float:
    """Battery power in kW as the internal-resistance relation writes it:
    R_in*I^2 + V_oc*I. The ohmic term is always a loss, so this is the
    chemistry-side draw on discharge (I > 0)."""
    if not (0.0 <= soc <= 100.0):
        raise ValueError("soc must lie in [0, 100]")
    v = b.v_oc(soc)
    return (b.r_in_ohm * i_amps * i_amps + v * i_amps) / 1000.0


def terminal_power_kw(b: BatteryParams, soc: float, i_amps: float) -> float:
    """Power delivered to the DC bus: V_oc*I - R_in*I^2 (kW)."""
    v = b.v_oc(soc)
    return (v * i_amps - b.r_in_ohm * i_amps * i_amps) / 1000.0


def chemistry_power_kw(b: BatteryParams, soc: float, i_amps: float) -> float:
    """Power drawn from the cell chemistry: V_oc*I (kW); this is the
    quantity the SOC integral consumes."""
    return b.v_oc(soc) * i_amps / 1000.0


def current_from_power(b: BatteryParams, soc: float, p_terminal_kw: float) -> float:
    """Invert the terminal-power relation for current.

    Solves V_oc*I - R_in*I^2 = P for the root with smaller magnitude.

    Raises
    ------
    EnvelopeError
        When the demand exceeds the maximum deliverable power
        (discriminant < 0).
    """
    v = b.v_oc(soc)
    p_w = p_terminal_kw * 1000.0
    if b.r_in_ohm == 0.0:
        return p_w / v
    disc = v * v - 4.0 * b.r_in_ohm * p_w
    if disc < 0:
        raise EnvelopeError(
            f"terminal demand {p_terminal_kw:.2f} kW exceeds battery capability "
            f"({v * v / (4000.0 * b.r_in_ohm):.2f} kW at V_oc = {v:.0f} V)")
    return (v - math.sqrt(disc)) / (2.0 * b.r_in_ohm)


def integrate_soc(b: BatteryParams, start_soc: float, t_s, i_amps) -> SocResult:
    """Integrate SOC over a current series (trapezoidal).

    Discharge current lowers SOC:
    delta = -integral(V_oc * I) dt / (3.6e6 * C_batt) * 100.
    V_oc is held at the running SOC within each segment. The result is
    clamped to [0, 100]; the flag reports whether clamping occurred.
    """
    if not (0.0 <= start_soc <= 100.0):
        raise ValueError("start_soc must lie in [0, 100]")
    t = np.asarray(t_s, dtype=float)
    i = np.asarray(i_amps, dtype=float)
    if t.size != i.size:
        raise ValueError("time and current series must have equal length")
    soc = float(start_soc)
    clamped = False
    for k in range(t.size - 1):
        dt = t[k + 1] - t[k]
        v = b.v_oc(soc)
        energy_j = v * 0.5 * (i[k] + i[k + 1]) * dt
        soc -= energy_j / (3.6e6 * b.c_batt_kwh) * 100.0
        if soc < 0.0:
            soc, clamped = 0.0, True
        elif soc > 100.0:
            soc, clamped = 100.0, True
    return SocResult(soc, clamped)


# ---------------------------------------------------------------------------
# Gen-set operating points

@dataclass
class GenSetPoint:
    """A single gen-set operating point: the engine node plus the combined
    fuel-to-electricity efficiency and electrical output there."""

    engine_speed_rpm: float
    engine_torque_nm: float
    combined_efficiency_pct: float
    electrical_power_kw: float

    def __post_init__(self) -> None:
        if not (0.0 < self.combined_efficiency_pct <= 100.0):
            raise ValueError("combined efficiency must lie in (0, 100]")
        if self.electrical_power_kw < 0:
            raise ValueError("electrical power must be nonnegative")


def genset_electrical_kw(engine_map: EfficiencyMap, gen_map: EfficiencyMap,
                         belt_ratio: float, speed_rpm: float, torque_nm: float,
                         belt_efficiency: float = 1.0) -> float:
    """Electrical output of the gen-set at an engine operating point."""
    eta_gen = map_lookup(gen_map, speed_rpm * belt_ratio, torque_nm / belt_ratio)
    p_mech_kw = torque_nm * speed_rpm * RAD_S_PER_RPM / 1000.0
    return p_mech_kw * belt_efficiency * eta_gen / 100.0


def genset_point_at(engine_map: EfficiencyMap, gen_map: EfficiencyMap,
                    belt_ratio: float, speed_rpm: float, electrical_kw: float,
                    belt_efficiency: float = 1.0) -> GenSetPoint:
    """Find the engine torque at a fixed speed that produces the requested
    electrical power, by bisection over the feasible torque range."""
    if electrical_kw < 0:
        raise ValueError("electrical power must be nonnegative")
    t_hi = max_feasible_torque(engine_map, speed_rpm)
    t_hi = min(t_hi, max_feasible_torque(gen_map, speed_rpm * belt_ratio) * belt_ratio)
    if t_hi <= 0:
        raise EnvelopeError(f"gen-set has no feasible torque at {speed_rpm:g} rpm")
    p_hi = genset_electrical_kw(engine_map, gen_map, belt_ratio, speed_rpm, t_hi,
                                belt_efficiency)
    if electrical_kw > p_hi + 1e-12:
        raise EnvelopeError(
            f"{electrical_kw:.2f} kW exceeds the gen-set's {p_hi:.2f} kW "
            f"capability at {speed_rpm:g} rpm")
    lo, hi = 0.0, t_hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        p_mid = genset_electrical_kw(engine_map, gen_map, belt_ratio, speed_rpm, mid,
                                     belt_efficiency)
        if p_mid < electrical_kw:
            lo = mid
        else:
            hi = mid
    torque = 0.5 * (lo + hi)
    eta_eng = map_lookup(engine_map, speed_rpm, torque)
    eta_gen = map_lookup(gen_map, speed_rpm * belt_ratio, torque / belt_ratio)
    combined = eta_eng * eta_gen / 100.0 * belt_efficiency
    return GenSetPoint(speed_rpm, torque, combined, electrical_kw)


# ---------------------------------------------------------------------------
# Assembly

@dataclass
class PowertrainAssembly:
    """All component maps of the series powertrain plus the merged gen-set
    map, kept together so scenario code passes one object around."""

    motor_map: EfficiencyMap
    engine_map: EfficiencyMap
    generator_map: EfficiencyMap
    belt_ratio: float = DEFAULT_BELT_RATIO
    belt_efficiency: float = 1.0
    drivetrain: DrivetrainParams = field(default_factory=DrivetrainParams)
    merged_map: EfficiencyMap = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.merged_map is None:
            self.merged_map = merge_gen_set(self.engine_map, self.generator_map,
                                            self.belt_ratio, self.belt_efficiency)

    @classmethod
    def synthetic(cls) -> "PowertrainAssembly":
        return cls(motor_map=synthetic_motor_map(),
                   engine_map=synthetic_engine_map(),
                   generator_map=synthetic_generator_map())

    def genset_point(self, speed_rpm: float, electrical_kw: float) -> GenSetPoint:
        return genset_point_at(self.engine_map, self.generator_map, self.belt_ratio,
                               speed_rpm, electrical_kw, self.belt_efficiency)
