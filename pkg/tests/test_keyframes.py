import json
import math

import numpy as np
import pytest

from miniq import legkin
from miniq.errors import InvalidParams, SpeedViolation, Unreachable
from miniq.gait import DEFAULT_OMEGA_MAX, LegId
from miniq.keyframes import builtin_scripts, load_builtin, parse_script, script_to_trajectory


def _frame(t, target, interp="linear"):
    return {"time_s": t, "interpolation": interp, "legs": {k: target for k in ("fl", "fr", "rl", "rr")}}


def test_builtin_scripts_listed():
    assert builtin_scripts() == ["backflip", "jump", "low_crawl_entry", "stair_front_lift", "stair_rear_lift"]


@pytest.mark.parametrize("name", builtin_scripts())
def test_builtin_scripts_reachable_and_continuous(name, default_geom):
    traj = script_to_trajectory(load_builtin(name), default_geom, 0.005)
    assert traj.max_step() <= DEFAULT_OMEGA_MAX * traj.dt
    assert np.all(np.isfinite(traj.samples))


def test_unknown_builtin():
    with pytest.raises(InvalidParams):
        load_builtin("moonwalk")


@pytest.mark.parametrize("data", [
    [],
    "{}",
    [{"legs": {}}],
    [_frame(0.0, {"q": [0, 0]}, "cubic")],
    [{"time_s": 0, "legs": {"fl": {"q": [0, 0]}}}],
    [_frame(0.0, {"q": [0, 0], "xy": [0, -0.03]})],
    [_frame(0.0, {"q": [0, 0]}), _frame(0.0, {"q": [0, 0]})],
])
def test_malformed_scripts_rejected(data):
    with pytest.raises(InvalidParams):
        parse_script(data if isinstance(data, str) else json.dumps(data))


def test_linear_interpolation_midpoint(default_geom):
    frames = parse_script([_frame(0.0, {"q": [0.0, 0.0]}), _frame(1.0, {"q": [1.0, 0.5]})])
    traj = script_to_trajectory(frames, default_geom, 0.1)
    assert len(traj) == 11
    mid = legkin.actuator_to_joint(tuple(traj.leg(LegId.RL)[5]))
    assert mid == pytest.approx((0.5, 0.25), abs=1e-12)


def test_hold_keeps_pose_until_next_frame(default_geom):
    frames = parse_script([_frame(0.0, {"q": [0.0, 0.0]}, "hold"), _frame(1.0, {"q": [0.2, 0.0]})])
    traj = script_to_trajectory(frames, default_geom, 0.1)
    assert np.all(traj.samples[:-1] == 0.0)
    assert traj.samples[-1, 0] == pytest.approx(0.2)


def test_hold_snap_can_violate_speed(default_geom):
    frames = parse_script([_frame(0.0, {"q": [0.0, 0.0]}, "hold"), _frame(1.0, {"q": [2.0, 0.0]})])
    with pytest.raises(SpeedViolation):
        script_to_trajectory(frames, default_geom, 0.01)


def test_joint_targets_may_wind(default_geom):
    frames = parse_script([_frame(0.0, {"q": [0.0, 0.0]}), _frame(1.0, {"q": [4 * math.pi, 0.0]})])
    traj = script_to_trajectory(frames, default_geom, 0.01)
    assert traj.samples[-1, 0] == pytest.approx(4 * math.pi)


def test_cartesian_targets_unwrap_toward_previous(default_geom):
    frames = parse_script([
        _frame(0.0, {"q": [2 * math.pi - math.pi / 2, 0.3]}),
        _frame(0.5, {"xy": [0.0, -0.04], "elbow": "-"}),
    ])
    traj = script_to_trajectory(frames, default_geom, 0.01)
    assert np.max(np.abs(np.diff(traj.samples, axis=0))) < 0.2


def test_unreachable_cartesian_target(default_geom):
    frames = parse_script([_frame(0.0, {"xy": [0.0, -0.1]})])
    with pytest.raises(Unreachable):
        script_to_trajectory(frames, default_geom, 0.01)
