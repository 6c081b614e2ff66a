"""Open-loop keyframe scripts (stair lift, low crawl entry, jump, backflip).

A script is a JSON list of keyframes::

    [{"time_s": 0.0, "interpolation": "linear",
      "legs": {"fl": {"q": [q1, q2]}, "fr": {"xy": [x, y], "elbow": "-"}, ...}}, ...]

Joint-space targets are taken literally (they may wind past 2*pi); Cartesian
targets are solved with IK and unwrapped toward the previous keyframe.
``interpolation`` governs the segment that *starts* at that keyframe:
``linear`` ramps to the next keyframe, ``hold`` keeps the pose and snaps at
the next keyframe time.  Only reachability and continuity are checked.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import legkin
from .errors import InvalidParams
from .gait import DEFAULT_OMEGA_MAX, LEGS, ActuatorTrajectory, LegId, unwrap_toward
from .legkin import Branch, FootPoint, JointAngles, LegGeometry


@dataclass(frozen=True)
class Keyframe:
    time_s: float
    targets: dict
    interpolation: str = "linear"


def parse_script(data) -> list[Keyframe]:
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    if not isinstance(data, list) or not data:
        raise InvalidParams("keyframe script must be a non-empty JSON list")
    frames = []
    for i, item in enumerate(data):
        try:
            t = float(item["time_s"])
            interp = item.get("interpolation", "linear")
            legs = {LegId.parse(k): v for k, v in item["legs"].items()}
        except (KeyError, TypeError, AttributeError) as exc:
            raise InvalidParams(f"keyframe {i}: malformed entry ({exc})") from None
        if interp not in ("linear", "hold"):
            raise InvalidParams(f"keyframe {i}: interpolation must be 'linear' or 'hold'")
        if set(legs) != set(LEGS):
            raise InvalidParams(f"keyframe {i}: targets for all four legs are required")
        for leg, target in legs.items():
            if ("q" in target) == ("xy" in target):
                raise InvalidParams(f"keyframe {i}, leg {leg.name}: give exactly one of 'q' or 'xy'")
        if frames and t <= frames[-1].time_s:
            raise InvalidParams(f"keyframe {i}: times must be strictly increasing")
        frames.append(Keyframe(t, legs, interp))
    return frames


def _frame_pose(geom: LegGeometry, frame: Keyframe, previous: np.ndarray | None) -> np.ndarray:
    pose = np.empty(8)
    cartesian = np.zeros(8, dtype=bool)
    for leg in LEGS:
        target = frame.targets[leg]
        if "q" in target:
            joints = JointAngles(*map(float, target["q"]))
        else:
            branch = Branch.parse(target.get("elbow", "-"))
            joints = legkin.inverse_kinematics(geom, FootPoint(*map(float, target["xy"])), branch).joints
            cartesian[2 * leg.value:2 * leg.value + 2] = True
        pose[2 * leg.value:2 * leg.value + 2] = legkin.joint_to_actuator(joints)
    if previous is not None:
        pulled = unwrap_toward(pose[None, :], previous)[0]
        pose = np.where(cartesian, pulled, pose)
    return pose


def script_to_trajectory(frames: list[Keyframe], geom: LegGeometry, dt: float,
                         omega_max: float = DEFAULT_OMEGA_MAX) -> ActuatorTrajectory:
    """Sample a script at ``dt`` from the first to the last keyframe time."""
    if dt <= 0:
        raise InvalidParams("dt must be > 0")
    poses = []
    for frame in frames:
        poses.append(_frame_pose(geom, frame, poses[-1] if poses else None))
    poses = np.array(poses)
    times = np.array([f.time_s for f in frames])
    t0 = times[0]
    n = int(round((times[-1] - t0) / dt))
    t = t0 + np.arange(n + 1) * dt
    seg = np.clip(np.searchsorted(times, t, side="right") - 1, 0, len(frames) - 1)
    out = np.empty((n + 1, 8))
    for k, (tk, s) in enumerate(zip(t, seg)):
        if s == len(frames) - 1 or frames[s].interpolation == "hold":
            out[k] = poses[s]
        else:
            u = (tk - times[s]) / (times[s + 1] - times[s])
            out[k] = poses[s] + u * (poses[s + 1] - poses[s])
    traj = ActuatorTrajectory(dt, out)
    traj.check_speed(omega_max)
    return traj


def builtin_scripts() -> list[str]:
    root = resources.files("miniq") / "data" / "scripts"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_builtin(name: str) -> list[Keyframe]:
    path = resources.files("miniq") / "data" / "scripts" / f"{name}.json"
    if not path.is_file():
        raise InvalidParams(f"unknown script {name!r}; known: {builtin_scripts()}")
    return parse_script(path.read_text(encoding="utf-8"))
