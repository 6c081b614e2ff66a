"""Quasi-static, no-slip locomotion model on flat ground.

Inertia is ignored: at every instant the stance feet carry the body weight
in equal shares, actuator torques follow from the static Jacobian transpose,
and each motor draws current on an affine torque/current line.  Forward
speed is pure kinematics: a foot that does not slip moves the body by one
stroke per stance phase.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from . import legkin
from .errors import InvalidParams, OverTorque, SpeedViolation
from .gait import LEGS, GaitSpec, LegId, RotaryCommand, gait_to_actuator
from .legkin import JointAngles, LegGeometry, WrenchForce
from .metrics import cost_of_transport, normalized_speed


@dataclass(frozen=True)
class RobotConfig:
    mass: float = 0.240
    body_length: float = 0.088
    geom: LegGeometry = legkin.DEFAULT_GEOMETRY
    gravity: float = 9.81
    bus_voltage: float = 6.0
    transmission_efficiency: float = 1.0

    def __post_init__(self):
        for name in ("mass", "body_length", "gravity", "bus_voltage"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.transmission_efficiency <= 1:
            raise ValueError("transmission_efficiency must lie in (0, 1]")

    @property
    def weight(self) -> float:
        return self.mass * self.gravity


@dataclass(frozen=True)
class MotorModel:
    """Affine DC-servo model; defaults approximate the 6 V datasheet operating point."""

    stall_torque: float = 0.228
    no_load_speed: float = 47.7
    no_load_current: float = 0.05
    stall_current: float = 1.47

    def __post_init__(self):
        if not (self.stall_torque > 0 and self.no_load_speed > 0):
            raise ValueError("stall_torque and no_load_speed must be positive")
        if not self.stall_current > self.no_load_current >= 0:
            raise ValueError("need stall_current > no_load_current >= 0")


@dataclass
class SimResult:
    v_ss: float
    normalized_v: float
    avg_current: float
    cot: float
    stance_torques: np.ndarray
    foot_forces: np.ndarray = field(default_factory=lambda: np.zeros((0, 4)))
    actuator_speeds: np.ndarray = field(default_factory=lambda: np.zeros((0, 8)))
    dt: float = 0.0

    def to_dict(self) -> dict:
        return {
            "v_ss": self.v_ss,
            "normalized_v": self.normalized_v,
            "avg_current": self.avg_current,
            "cot": self.cot,
            "stance_torques": np.asarray(self.stance_torques).tolist(),
        }

    def summary(self) -> dict:
        out = self.to_dict()
        del out["stance_torques"]
        tau = np.abs(np.asarray(self.stance_torques))
        out["peak_torque"] = float(tau.max()) if tau.size else 0.0
        speed = np.abs(np.asarray(self.actuator_speeds))
        out["peak_speed"] = float(speed.max()) if speed.size else 0.0
        return out


def motor_current(motor: MotorModel, torque: float, speed: float = 0.0) -> float:
    """Supply current (A) at ``torque`` (N*m).  ``speed`` is accepted but unused."""
    tau = abs(torque)
    if tau > motor.stall_torque * (1.0 + 1e-12):
        raise OverTorque(f"|torque| {tau:.6g} N*m exceeds stall torque {motor.stall_torque:.6g} N*m")
    return motor.no_load_current + (motor.stall_current - motor.no_load_current) * tau / motor.stall_torque


def _currents(motor: MotorModel, torques: np.ndarray) -> np.ndarray:
    tau = np.abs(torques)
    worst = float(tau.max()) if tau.size else 0.0
    if worst > motor.stall_torque * (1.0 + 1e-12):
        raise OverTorque(f"|torque| {worst:.6g} N*m exceeds stall torque {motor.stall_torque:.6g} N*m")
    return motor.no_load_current + (motor.stall_current - motor.no_load_current) * tau / motor.stall_torque


def _cot(cfg: RobotConfig, avg_current: float, v_ss: float) -> float:
    if v_ss <= 0:
        return math.inf
    return cost_of_transport(cfg.bus_voltage, avg_current, cfg.mass, cfg.gravity, v_ss)


def gait_speed(spec: GaitSpec) -> float:
    p = spec.params
    if spec.path != "stroke":
        return 0.0
    return p.step_length * p.frequency / p.duty


def simulate_gait(spec: GaitSpec, cfg: RobotConfig, motor: MotorModel, samples_per_cycle: int = 200) -> SimResult:
    p = spec.params
    if spec.path != "stroke":
        raise InvalidParams("simulate_gait needs a stroke gait")
    geom = cfg.geom
    dt = p.period / samples_per_cycle
    traj = gait_to_actuator(spec, geom, dt, cycles=1, omega_max=motor.no_load_speed)
    theta = traj.samples
    rates = np.gradient(theta, dt, axis=0)
    theta, rates = theta[:-1], rates[:-1]  # last row repeats the first
    phases = np.arange(len(theta)) * dt * p.frequency
    stance = np.array([[spec.in_stance(leg, ph) for leg in LEGS] for ph in phases])
    n_stance = stance.sum(axis=1)
    if np.any(n_stance == 0):
        k = int(np.flatnonzero(n_stance == 0)[0])
        raise InvalidParams(f"no stance leg at phase {phases[k]:.4f}; quasi-static support is impossible")

    share = np.where(stance, cfg.weight / n_stance[:, None], 0.0)
    torques = np.zeros_like(theta)
    for k in range(len(theta)):
        for leg in LEGS:
            if not stance[k, leg.value]:
                continue
            t1, t2 = theta[k, 2 * leg.value:2 * leg.value + 2]
            joints = legkin.actuator_to_joint((t1, t2))
            # the foot pushes the ground down with its share of the weight
            tau = legkin.static_torques(geom, joints, WrenchForce(0.0, -share[k, leg.value]))
            torques[k, 2 * leg.value:2 * leg.value + 2] = tau
    torques = torques / cfg.transmission_efficiency
    currents = _currents(motor, torques)
    avg_current = float(currents.sum(axis=1).mean())
    v_ss = gait_speed(spec)
    return SimResult(
        v_ss=v_ss,
        normalized_v=normalized_speed(v_ss, cfg.body_length),
        avg_current=avg_current,
        cot=_cot(cfg, avg_current, v_ss),
        stance_torques=torques,
        foot_forces=share,
        actuator_speeds=rates,
        dt=dt,
    )


def simulate_rotary(cmd: RotaryCommand, cfg: RobotConfig, motor: MotorModel, samples: int = 360) -> SimResult:
    """Straight legs rolling as spokes, diagonal pairs half a turn apart.

    A spoke touches the ground while it points into the lower half plane,
    so two legs always share the weight.  The support torque is the share of
    the weight times the spoke's horizontal lever arm.
    """
    if abs(cmd.omega) > motor.no_load_speed:
        raise SpeedViolation(
            f"|omega| {abs(cmd.omega):.6g} rad/s exceeds no-load speed {motor.no_load_speed:.6g} rad/s"
        )
    if samples < 2 or samples % 2:
        raise InvalidParams("samples must be an even integer >= 2")
    geom = cfg.geom
    half = samples // 2
    offsets = {LegId.FL: 0, LegId.RR: 0, LegId.FR: half, LegId.RL: half}
    share = cfg.weight / 2.0
    torques = np.zeros((samples, 8))
    forces = np.zeros((samples, 4))
    for k in range(samples):
        for leg in LEGS:
            j = (k + offsets[leg]) % samples
            if j >= half:
                continue  # spoke in the upper half plane
            angle = -math.pi + 2.0 * math.pi * j / samples
            tau = legkin.static_torques(geom, JointAngles(angle, 0.0), WrenchForce(0.0, -share))
            torques[k, 2 * leg.value:2 * leg.value + 2] = tau
            forces[k, leg.value] = share
    torques = torques / cfg.transmission_efficiency
    currents = _currents(motor, torques)
    avg_current = float(currents.sum(axis=1).mean())
    v_ss = cmd.rim_speed(geom)
    return SimResult(
        v_ss=v_ss,
        normalized_v=normalized_speed(v_ss, cfg.body_length),
        avg_current=avg_current,
        cot=_cot(cfg, avg_current, v_ss),
        stance_torques=torques,
        foot_forces=forces,
        actuator_speeds=np.full((samples, 8), cmd.omega),
        dt=(2.0 * math.pi / abs(cmd.omega) / samples) if cmd.omega else 0.0,
    )


SWEEP_FIELDS = ("step_length", "step_height", "body_height", "frequency", "duty")


def sweep_gait(spec: GaitSpec, cfg: RobotConfig, motor: MotorModel, param: str,
               values: Iterable[float]) -> list[dict]:
    """Simulate ``spec`` once per value of ``param``; failed runs keep their error name."""
    if param not in SWEEP_FIELDS and param != "mass":
        raise InvalidParams(f"cannot sweep {param!r}; choose from {SWEEP_FIELDS + ('mass',)}")
    rows = []
    for value in values:
        row = {"param": param, "value": float(value)}
        try:
            if param == "mass":
                run_spec, run_cfg = spec, replace(cfg, mass=float(value))
            else:
                run_spec = replace(spec, params=replace(spec.params, **{param: float(value)}))
                run_cfg = cfg
            res = simulate_gait(run_spec, run_cfg, motor)
            row.update(res.summary())
            row["error"] = ""
        except (InvalidParams, OverTorque, SpeedViolation, legkin.Unreachable) as exc:
            row.update({"v_ss": math.nan, "normalized_v": math.nan, "avg_current": math.nan,
                        "cot": math.nan, "peak_torque": math.nan, "peak_speed": math.nan,
                        "error": type(exc).__name__})
        rows.append(row)
    return rows


def sweep_to_csv(rows: list[dict]) -> str:
    out = io.StringIO()
    cols = ["param", "value", "v_ss", "normalized_v", "avg_current", "cot", "peak_torque", "peak_speed", "error"]
    writer = csv.DictWriter(out, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return out.getvalue()
