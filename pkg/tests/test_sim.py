import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from miniq import metrics
from miniq.errors import InvalidParams, OverTorque, SpeedViolation
from miniq.gait import PRESETS, TROT_PHASES, GaitParams, circle_gait, make_gait, preset, rotary_command
from miniq.sim import (
    MotorModel,
    RobotConfig,
    gait_speed,
    motor_current,
    simulate_gait,
    simulate_rotary,
    sweep_gait,
    sweep_to_csv,
)

CFG = RobotConfig()
MOTOR = MotorModel()
TROT = make_gait(GaitParams("trot", 0.02, 0.01, 0.04, 2.0, 0.5, TROT_PHASES))


def test_config_validation():
    with pytest.raises(ValueError):
        RobotConfig(mass=0)
    with pytest.raises(ValueError):
        RobotConfig(transmission_efficiency=1.5)
    with pytest.raises(ValueError):
        MotorModel(no_load_current=2.0)


def test_motor_current_endpoints():
    assert motor_current(MOTOR, 0.0) == MOTOR.no_load_current
    assert motor_current(MOTOR, MOTOR.stall_torque) == pytest.approx(MOTOR.stall_current, rel=1e-15)
    assert motor_current(MOTOR, -MOTOR.stall_torque / 2) == pytest.approx(
        (MOTOR.no_load_current + MOTOR.stall_current) / 2, rel=1e-15)
    with pytest.raises(OverTorque):
        motor_current(MOTOR, MOTOR.stall_torque * 1.01)


def test_trot_speed_exact():
    res = simulate_gait(TROT, CFG, MOTOR)
    assert res.v_ss == 0.08
    assert res.normalized_v == 0.08 / 0.088


@settings(max_examples=60, deadline=None)
@given(st.floats(0.001, 0.04), st.floats(0.5, 4.0), st.sampled_from([0.5, 0.6, 0.75]))
def test_speed_formula(step, freq, duty):
    spec = make_gait(GaitParams("g", step, 0.008, 0.04, freq, duty, (0.0, 0.5, 0.25, 0.75)))
    assert abs(gait_speed(spec) - step * freq / duty) <= 1e-12 * step * freq / duty


def test_stance_forces_sum_to_weight():
    for name in ("slow_trot", "crawl", "low_crawl"):
        res = simulate_gait(make_gait(PRESETS[name]), CFG, MOTOR)
        assert np.max(np.abs(res.foot_forces.sum(axis=1) - CFG.weight)) <= 1e-9


def test_cot_recomputes_bit_for_bit():
    res = simulate_gait(make_gait(PRESETS["fast_trot"]), CFG, MOTOR)
    assert res.cot == metrics.cost_of_transport(CFG.bus_voltage, res.avg_current, CFG.mass, CFG.gravity, res.v_ss)
    rot = simulate_rotary(rotary_command(5.0), CFG, MOTOR)
    assert rot.cot == metrics.cost_of_transport(CFG.bus_voltage, rot.avg_current, CFG.mass, CFG.gravity, rot.v_ss)


def test_doubling_mass_doubles_torques():
    light = simulate_gait(TROT, CFG, MOTOR)
    heavy = simulate_gait(TROT, dataclasses.replace(CFG, mass=2 * CFG.mass), MOTOR)
    assert np.array_equal(heavy.stance_torques, 2 * light.stance_torques)
    assert heavy.avg_current > light.avg_current
    # the no-load share of the current does not scale, so COT falls slightly
    assert heavy.cot <= light.cot
    ideal = dataclasses.replace(MOTOR, no_load_current=0.0)
    a = simulate_gait(TROT, CFG, ideal)
    b = simulate_gait(TROT, dataclasses.replace(CFG, mass=2 * CFG.mass), ideal)
    assert b.cot == pytest.approx(a.cot, rel=1e-12)


def test_efficiency_scales_torque():
    ideal = simulate_gait(TROT, CFG, MOTOR)
    lossy = simulate_gait(TROT, dataclasses.replace(CFG, transmission_efficiency=0.5), MOTOR)
    assert np.allclose(lossy.stance_torques, 2 * ideal.stance_torques, rtol=1e-15)
    assert lossy.cot > ideal.cot


def test_zero_speed_gives_infinite_cot():
    res = simulate_gait(make_gait(preset("slow_trot", step_length=0.0)), CFG, MOTOR)
    assert res.v_ss == 0.0
    assert res.cot == math.inf


def test_speed_vanishes_as_frequency_drops():
    speeds = [simulate_gait(make_gait(preset("slow_trot", frequency=f)), CFG, MOTOR).v_ss
              for f in (1.0, 1e-2, 1e-4)]
    assert speeds == sorted(speeds, reverse=True)
    assert speeds[-1] < 1e-5


def test_no_stance_leg_rejected():
    p = GaitParams("hop", 0.02, 0.01, 0.04, 2.0, 0.3, (0.0, 0.0, 0.0, 0.0))
    with pytest.raises(InvalidParams):
        simulate_gait(make_gait(p), CFG, MOTOR)
    with pytest.raises(InvalidParams):
        simulate_gait(circle_gait(0.04, 1.0), CFG, MOTOR)


def test_over_torque_for_heavy_robot():
    with pytest.raises(OverTorque):
        simulate_gait(TROT, dataclasses.replace(CFG, mass=20.0), MOTOR)


def test_rotary_examples():
    zero = simulate_rotary(rotary_command(0.0), CFG, MOTOR)
    assert zero.v_ss == 0.0 and zero.cot == math.inf
    res = simulate_rotary(rotary_command(5.0), CFG, MOTOR)
    assert res.v_ss == 5.0 * (0.029 + 0.029)
    assert res.v_ss == pytest.approx(0.29, rel=1e-15)
    assert np.max(np.abs(res.foot_forces.sum(axis=1) - CFG.weight)) <= 1e-9
    assert np.all((res.foot_forces > 0).sum(axis=1) == 2)


def test_rotary_linear_in_omega(rng):
    omegas = rng.uniform(-40, 40, 10)
    base = simulate_rotary(rotary_command(1.0), CFG, MOTOR).v_ss
    for w in omegas:
        v = simulate_rotary(rotary_command(w), CFG, MOTOR).v_ss
        assert v == pytest.approx(abs(w) * base, rel=1e-14)


def test_rotary_speed_violation():
    with pytest.raises(SpeedViolation):
        simulate_rotary(rotary_command(MOTOR.no_load_speed * 1.1), CFG, MOTOR)
    with pytest.raises(InvalidParams):
        simulate_rotary(rotary_command(1.0), CFG, MOTOR, samples=7)


def test_result_serialisation():
    res = simulate_gait(TROT, CFG, MOTOR)
    d = res.to_dict()
    assert set(d) == {"v_ss", "normalized_v", "avg_current", "cot", "stance_torques"}
    assert len(d["stance_torques"]) == len(res.stance_torques)
    s = res.summary()
    assert "stance_torques" not in s and s["peak_torque"] > 0 and s["peak_speed"] > 0


def test_sweep_rows_and_csv():
    spec = make_gait(PRESETS["slow_trot"])
    rows = sweep_gait(spec, CFG, MOTOR, "step_length", [0.01, 0.02, 0.5])
    assert [r["error"] for r in rows] == ["", "", "Unreachable"]
    assert math.isnan(rows[2]["cot"])
    assert rows[1]["v_ss"] == pytest.approx(2 * rows[0]["v_ss"])
    lines = sweep_to_csv(rows).splitlines()
    assert lines[0].startswith("param,value,v_ss")
    assert len(lines) == 4
    mass_rows = sweep_gait(spec, CFG, MOTOR, "mass", [0.2, 0.4])
    assert mass_rows[1]["avg_current"] > mass_rows[0]["avg_current"]
    with pytest.raises(InvalidParams):
        sweep_gait(spec, CFG, MOTOR, "colour", [1])
