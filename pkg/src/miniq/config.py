"""Tool configuration: robot, motor, five-bar baseline and gait presets.

Stored as JSON; every section is optional and falls back to the built-in
defaults::

    {"robot": {"mass": 0.24, "body_length": 0.088, "gravity": 9.81,
               "bus_voltage": 6.0, "transmission_efficiency": 1.0,
               "geometry": {"l1": 0.029, "l2": 0.029}},
     "motor": {"stall_torque": 0.228, "no_load_speed": 47.7,
               "no_load_current": 0.05, "stall_current": 1.47},
     "fivebar": {"hip_separation": 0.0, "proximal": 0.025, "distal": 0.033,
                 "limits": [[-2.9, -1.9], [-1.25, -0.25]]},
     "gaits": {"fast_trot": {"step_length": 0.046, ...}, ...}}
"""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field

from .errors import ConfigError
from .gait import PRESETS, GaitParams
from .legkin import LegGeometry
from .sim import MotorModel, RobotConfig
from .workspace import DEFAULT_FIVEBAR, FiveBarGeometry

DEFAULT_CONFIG_PATH = "miniq.json"
CONFIG_ENV = "MINIQ_CONFIG"


@dataclass(frozen=True)
class ToolConfig:
    robot: RobotConfig = field(default_factory=RobotConfig)
    motor: MotorModel = field(default_factory=MotorModel)
    fivebar: FiveBarGeometry = DEFAULT_FIVEBAR
    gaits: dict = field(default_factory=lambda: dict(PRESETS))

    def gait(self, name: str) -> GaitParams:
        try:
            return self.gaits[name]
        except KeyError:
            raise ConfigError(f"unknown gait preset {name!r}; known: {sorted(self.gaits)}") from None

    def with_geometry(self, geom: LegGeometry) -> "ToolConfig":
        return dataclasses.replace(self, robot=dataclasses.replace(self.robot, geom=geom))

    def to_dict(self) -> dict:
        robot = {f.name: getattr(self.robot, f.name) for f in dataclasses.fields(self.robot) if f.name != "geom"}
        robot["geometry"] = {"l1": self.robot.geom.l1, "l2": self.robot.geom.l2}
        return {
            "robot": robot,
            "motor": dataclasses.asdict(self.motor),
            "fivebar": {
                "hip_separation": self.fivebar.hip_separation,
                "proximal": self.fivebar.proximal,
                "distal": self.fivebar.distal,
                "limits": [list(p) for p in self.fivebar.limits],
            },
            "gaits": {name: _gait_dict(p) for name, p in self.gaits.items()},
        }


def _gait_dict(p: GaitParams) -> dict:
    d = p.to_dict()
    del d["name"]
    return d


def _build(cls, data, section):
    if not isinstance(data, dict):
        raise ConfigError(f"config section {section!r} must be an object")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"config section {section!r}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"config section {section!r}: {exc}") from None


def config_from_dict(data: dict) -> ToolConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - {"robot", "motor", "fivebar", "gaits"}
    if unknown:
        raise ConfigError(f"unknown config section(s) {sorted(unknown)}")
    cfg = ToolConfig()
    if "robot" in data:
        robot = dict(data["robot"])
        geom = robot.pop("geometry", None)
        if geom is not None:
            robot["geom"] = _build(LegGeometry, geom, "robot.geometry")
        cfg = dataclasses.replace(cfg, robot=_build(RobotConfig, robot, "robot"))
    if "motor" in data:
        cfg = dataclasses.replace(cfg, motor=_build(MotorModel, data["motor"], "motor"))
    if "fivebar" in data:
        cfg = dataclasses.replace(cfg, fivebar=_build(FiveBarGeometry, data["fivebar"], "fivebar"))
    if "gaits" in data:
        gaits = dict(PRESETS)
        for name, params in data["gaits"].items():
            try:
                gaits[name] = GaitParams.from_dict(name, params)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"gait preset {name!r}: {exc}") from None
        cfg = dataclasses.replace(cfg, gaits=gaits)
    return cfg


def resolve_config_path(explicit: str | None = None) -> tuple[str, bool]:
    """Return ``(path, required)``; only an explicit path must exist."""
    if explicit:
        return explicit, True
    env = os.environ.get(CONFIG_ENV)
    if env:
        return env, True
    return DEFAULT_CONFIG_PATH, False


def load_config(explicit: str | None = None) -> ToolConfig:
    path, required = resolve_config_path(explicit)
    if not os.path.exists(path):
        if required:
            raise ConfigError(f"config file {path!r} not found")
        return ToolConfig()
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(data)
