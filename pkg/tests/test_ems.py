import numpy as np
import pytest

from phevopt.cycle import DriveCycle
from phevopt.ems import (
    MODE_CD,
    MODE_CS,
    EnergyResult,
    RuleConfig,
    simulate_rule_based,
    write_trace,
)
from phevopt.errors import EnvelopeError, InfeasibleVehicleError
from phevopt.powertrain import BatteryParams, terminal_power_kw

CAL = 1.1584804


@pytest.fixture(scope="module")
def cs_run(cycle, vp, assembly, battery, genset_point):
    """One lap started just above the CS trigger, so the run is mostly CS."""
    cfg = RuleConfig(genset_point, initial_soc=15.0)
    trace, energy = simulate_rule_based(cycle, vp, assembly.motor_map,
                                        assembly.drivetrain, battery, cfg, CAL)
    return trace, energy, cfg


@pytest.fixture(scope="module")
def cd_run(cycle, vp, assembly, battery, genset_point):
    """One lap started at high SOC: never reaches the trigger."""
    cfg = RuleConfig(genset_point, initial_soc=70.0)
    trace, energy = simulate_rule_based(cycle, vp, assembly.motor_map,
                                        assembly.drivetrain, battery, cfg)
    return trace, energy, cfg


class TestRuleConfigValidation:
    def test_defaults(self, genset_point):
        cfg = RuleConfig(genset_point)
        assert cfg.soc_high == 17.0 and cfg.soc_low == 12.0
        assert cfg.cs_trigger == 14.0
        assert cfg.min_dwell_s == 10.0 and cfg.warmup_s == 20.0
        assert cfg.crank_power_kw == 2.0
        assert cfg.regen_current_limit_a == 150.0

    @pytest.mark.parametrize("kwargs", [
        dict(cs_trigger=18.0),
        dict(cs_trigger=11.0),
        dict(soc_low=17.5),
        dict(min_dwell_s=-1.0),
        dict(warmup_s=-1.0),
        dict(crank_power_kw=-0.5),
        dict(regen_current_limit_a=0.0),
        dict(initial_soc=0.0),
        dict(initial_soc=101.0),
    ])
    def test_invalid_rejected(self, genset_point, kwargs):
        with pytest.raises(ValueError):
            RuleConfig(genset_point, **kwargs)


class TestModeMachine:
    def test_cs_entry_is_a_latch(self, cs_run):
        trace, _, _ = cs_run
        k = trace.cs_entry_index()
        assert k is not None and k > 0
        assert np.all(trace.mode[:k] == MODE_CD)
        assert np.all(trace.mode[k:] == MODE_CS)

    def test_entry_at_first_trigger_crossing(self, cs_run, genset_point):
        trace, _, cfg = cs_run
        k = trace.cs_entry_index()
        assert trace.soc_pct[k] <= cfg.cs_trigger
        assert np.all(trace.soc_pct[:k] > cfg.cs_trigger)

    def test_cd_only_run_never_switches(self, cd_run):
        trace, energy, _ = cd_run
        assert trace.cs_entry_index() is None
        assert np.all(trace.mode == MODE_CD)
        assert not trace.genset_on.any()
        assert trace.fuel_step_kwh.sum() == 0.0
        assert energy.ec_cs_fuel_wh_per_km == 0.0
        assert energy.cs_distance_km == 0.0
        assert trace.genset_transition_times().size == 0

    def test_cd_run_depletes(self, cd_run):
        trace, energy, cfg = cd_run
        assert energy.final_soc < cfg.initial_soc
        assert energy.ec_cd_dc_wh_per_km > 0.0


class TestThermostat:
    def test_genset_only_in_cs(self, cs_run):
        trace, _, _ = cs_run
        assert not trace.genset_on[trace.mode == MODE_CD].any()

    def test_genset_cycles(self, cs_run):
        trace, _, _ = cs_run
        assert trace.genset_transition_times().size >= 2

    def test_dwell_respected(self, cs_run):
        trace, _, cfg = cs_run
        gaps = np.diff(trace.genset_transition_times())
        assert np.all(gaps >= cfg.min_dwell_s)

    def test_turn_on_at_or_below_trigger(self, cs_run):
        trace, _, cfg = cs_run
        on = trace.genset_on.astype(np.int8)
        starts = np.nonzero(np.diff(on) == 1)[0] + 1
        assert starts.size > 0
        assert np.all(trace.soc_pct[starts] <= cfg.cs_trigger)

    def test_turn_off_at_or_above_window_top(self, cs_run):
        trace, _, cfg = cs_run
        on = trace.genset_on.astype(np.int8)
        stops = np.nonzero(np.diff(on) == -1)[0] + 1
        assert stops.size > 0
        assert np.all(trace.soc_pct[stops] >= cfg.soc_high)

    def test_warmup_produces_no_charge(self, cs_run, genset_point):
        trace, _, cfg = cs_run
        on = trace.genset_on.astype(np.int8)
        starts = np.nonzero(np.diff(on) == 1)[0] + 1
        for k0 in starts:
            k = k0
            while k < trace.n_samples and trace.genset_on[k]:
                elapsed = trace.t_s[k] - trace.t_s[k0]
                if elapsed < cfg.warmup_s:
                    assert not trace.genset_warm[k]
                    assert trace.p_genset_elec_kw[k] == 0.0
                    assert trace.crank_kw[k] == cfg.crank_power_kw
                    assert trace.fuel_step_kwh[k] == 0.0
                else:
                    assert trace.genset_warm[k]
                    assert trace.p_genset_elec_kw[k] == pytest.approx(
                        genset_point.electrical_power_kw)
                    assert trace.crank_kw[k] == 0.0
                k += 1

    def test_warm_implies_on(self, cs_run):
        trace, _, _ = cs_run
        assert not (trace.genset_warm & ~trace.genset_on).any()

    def test_charge_only_when_warm(self, cs_run):
        trace, _, _ = cs_run
        producing = trace.p_genset_elec_kw > 0.0
        assert np.array_equal(producing, trace.genset_warm)


class TestSocBehavior:
    def test_window_contained_within_step_quantum(self, cs_run):
        trace, _, cfg = cs_run
        cs = trace.mode == MODE_CS
        quantum = np.max(np.abs(np.diff(trace.soc_pct)))
        assert trace.soc_pct[cs].min() >= cfg.soc_low - quantum
        assert trace.soc_pct[cs].max() <= cfg.soc_high + quantum

    def test_soc_integrates_chemistry_power(self, cs_run, battery):
        trace, _, _ = cs_run
        dt = np.diff(trace.t_s)
        v_oc = np.asarray([battery.v_oc(s) for s in trace.soc_pct[:-1]])
        step = -v_oc * trace.i_batt_a[:-1] * dt / (3.6e6 * battery.c_batt_kwh) * 100.0
        assert np.allclose(np.diff(trace.soc_pct), step, atol=1e-12)

    def test_cd_soc_monotone_outside_regen(self, cs_run):
        trace, _, _ = cs_run
        k = trace.cs_entry_index()
        rising = np.diff(trace.soc_pct[:k]) > 1e-12
        regen = trace.i_batt_a[: k - 1] < 0.0
        assert not (rising & ~regen).any()

    def test_battery_empty_raises(self, cycle, vp, assembly, genset_point):
        tiny = BatteryParams(c_batt_kwh=0.2)
        cfg = RuleConfig(genset_point, initial_soc=70.0)
        with pytest.raises(InfeasibleVehicleError, match="battery empty"):
            simulate_rule_based(cycle, vp, assembly.motor_map,
                                assembly.drivetrain, tiny, cfg)


class TestRegenLimits:
    def test_bus_current_floor(self, cs_run):
        trace, _, cfg = cs_run
        assert trace.i_batt_a.min() >= -cfg.regen_current_limit_a - 1e-12

    def test_limit_actually_binds(self, cs_run):
        trace, _, cfg = cs_run
        assert np.isclose(trace.i_batt_a, -cfg.regen_current_limit_a).any()

    def test_clip_recomputes_motor_power(self, cs_run, battery):
        trace, _, cfg = cs_run
        clipped = np.isclose(trace.i_batt_a, -cfg.regen_current_limit_a)
        for k in np.nonzero(clipped)[0]:
            bus = (trace.p_motor_elec_kw[k] + trace.crank_kw[k]
                   - trace.p_genset_elec_kw[k])
            expect = terminal_power_kw(battery, trace.soc_pct[k],
                                       -cfg.regen_current_limit_a)
            assert bus == pytest.approx(expect, abs=1e-9)

    def test_regen_locked_out_at_window_top(self, cs_run):
        trace, _, cfg = cs_run
        locked = ((trace.mode == MODE_CS) & (trace.soc_pct >= cfg.soc_high)
                  & (trace.p_wheel_kw < 0.0))
        assert locked.any()
        assert np.all(trace.p_motor_elec_kw[locked] == 0.0)

    def test_regen_active_inside_window(self, cs_run):
        trace, _, _ = cs_run
        assert (trace.p_motor_elec_kw < 0.0).any()


class TestEnergyAccounting:
    def test_per_step_power_identity(self, cs_run, battery):
        # chemistry power = bus power + ohmic loss, every sample
        trace, _, _ = cs_run
        v_oc = np.asarray([battery.v_oc(s) for s in trace.soc_pct])
        chem = v_oc * trace.i_batt_a / 1000.0
        bus = (trace.p_motor_elec_kw + trace.crank_kw - trace.p_genset_elec_kw)
        ohmic = battery.r_in_ohm * trace.i_batt_a**2 / 1000.0
        assert np.allclose(chem, bus + ohmic, atol=1e-9)

    def test_cycle_energy_balance(self, cs_run, battery):
        trace, _, _ = cs_run
        dt = np.diff(trace.t_s)
        v_oc = np.asarray([battery.v_oc(s) for s in trace.soc_pct])
        chem = np.sum(v_oc[:-1] * trace.i_batt_a[:-1] / 1000.0 * dt)
        motor = np.sum(trace.p_motor_elec_kw[:-1] * dt)
        crank = np.sum(trace.crank_kw[:-1] * dt)
        gen = np.sum(trace.p_genset_elec_kw[:-1] * dt)
        ohmic = np.sum(battery.r_in_ohm * trace.i_batt_a[:-1]**2 / 1000.0 * dt)
        assert chem + gen == pytest.approx(motor + crank + ohmic, rel=1e-9)

    def test_fuel_step_formula(self, cs_run, genset_point):
        trace, _, _ = cs_run
        eff = genset_point.combined_efficiency_pct / 100.0
        dt = np.diff(trace.t_s)
        for k in np.nonzero(trace.fuel_step_kwh[:-1] > 0)[0]:
            expect = trace.p_genset_elec_kw[k] / eff * dt[k] / 3600.0
            assert trace.fuel_step_kwh[k] == pytest.approx(expect, rel=1e-12)

    def test_fuel_only_while_producing(self, cs_run):
        trace, _, _ = cs_run
        burning = trace.fuel_step_kwh > 0.0
        assert not (burning & (trace.p_genset_elec_kw == 0.0)).any()

    def test_distance_split(self, cs_run, cycle):
        _, energy, _ = cs_run
        assert energy.cd_distance_km + energy.cs_distance_km == pytest.approx(
            cycle.distance_km, rel=1e-12)
        assert energy.cd_distance_km > 0.0
        assert energy.cs_distance_km > energy.cd_distance_km

    def test_cs_fuel_rate_recomputable(self, cs_run):
        trace, energy, _ = cs_run
        k = trace.cs_entry_index()
        fuel = trace.fuel_step_kwh[k:-1].sum()
        assert energy.ec_cs_fuel_wh_per_km == pytest.approx(
            fuel * 1000.0 / energy.cs_distance_km, rel=1e-12)

    def test_cd_energy_recomputable(self, cs_run, battery):
        trace, energy, _ = cs_run
        k = trace.cs_entry_index()
        dt = np.diff(trace.t_s)[:k]
        v_oc = np.asarray([battery.v_oc(s) for s in trace.soc_pct[:k]])
        kwh = np.sum(v_oc * trace.i_batt_a[:k] / 1000.0 * dt) / 3600.0
        assert energy.ec_cd_dc_wh_per_km == pytest.approx(
            kwh * 1000.0 / energy.cd_distance_km, rel=1e-12)


class TestErrorsAndValidation:
    def test_envelope_error_names_step(self, cycle, vp, assembly, battery,
                                       genset_point):
        cfg = RuleConfig(genset_point, initial_soc=70.0)
        with pytest.raises(EnvelopeError, match=r"step \d+ \(t = "):
            simulate_rule_based(cycle, vp, assembly.motor_map,
                                assembly.drivetrain, battery, cfg,
                                calibration=10.0)

    def test_calibration_validated(self, cycle, vp, assembly, battery,
                                   genset_point):
        cfg = RuleConfig(genset_point)
        with pytest.raises(ValueError):
            simulate_rule_based(cycle, vp, assembly.motor_map,
                                assembly.drivetrain, battery, cfg,
                                calibration=0.0)

    def test_energy_result_validated(self):
        with pytest.raises(ValueError):
            EnergyResult(100.0, 200.0, -1.0, 5.0, 15.0)

    def test_deterministic(self, cycle, vp, assembly, battery, genset_point):
        cfg = RuleConfig(genset_point, initial_soc=15.0)
        a, _ = simulate_rule_based(cycle, vp, assembly.motor_map,
                                   assembly.drivetrain, battery, cfg, CAL)
        b, _ = simulate_rule_based(cycle, vp, assembly.motor_map,
                                   assembly.drivetrain, battery, cfg, CAL)
        assert np.array_equal(a.soc_pct, b.soc_pct)
        assert np.array_equal(a.i_batt_a, b.i_batt_a)
        assert np.array_equal(a.fuel_step_kwh, b.fuel_step_kwh)


class TestTraceExport:
    def test_header_and_shape(self, cs_run, tmp_path):
        trace, _, _ = cs_run
        path = tmp_path / "trace.csv"
        write_trace(trace, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("t_s,v_mps,mode,genset_on")
        assert len(lines) == trace.n_samples + 1

    def test_row_values_round_trip(self, cs_run, tmp_path):
        trace, _, _ = cs_run
        path = tmp_path / "trace.csv"
        write_trace(trace, path)
        lines = path.read_text().splitlines()
        k = trace.cs_entry_index()
        row = lines[k + 1].split(",")
        assert float(row[0]) == pytest.approx(trace.t_s[k], abs=1e-3)
        assert row[2] == "CS"
        assert float(row[10]) == pytest.approx(trace.soc_pct[k], abs=1e-6)
        first = lines[1].split(",")
        assert first[2] == "CD"
