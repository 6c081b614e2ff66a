"""Gait and trajectory synthesis.

Foot paths are expressed per leg in the hip frame (x forward, y up).  The
standard family is a straight stance stroke at ``y = -body_height`` followed
by a half-ellipse swing; a hip-centred circle is available for rotary
walking.  Paths are turned into actuator streams by per-sample IK followed
by unwrapping, so actuator angles grow without bound instead of resetting.
"""
from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from . import legkin
from .errors import InvalidParams, SpeedViolation
from .legkin import ActuatorAngles, Branch, FootPoint, JointAngles, LegGeometry

#: 6 V no-load speed of the hip/knee servos (rad/s), datasheet-derived.
DEFAULT_OMEGA_MAX = 47.7

#: The robot rights itself within this many seconds.
FLIP_TIME_LIMIT = 0.5

TWO_PI = 2.0 * math.pi


class LegId(enum.Enum):
    FL = 0
    FR = 1
    RL = 2
    RR = 3

    @classmethod
    def parse(cls, text) -> "LegId":
        if isinstance(text, cls):
            return text
        return cls[str(text).upper()]


LEGS = (LegId.FL, LegId.FR, LegId.RL, LegId.RR)
CHANNELS = tuple(f"{leg.name.lower()}_t{k}" for leg in LEGS for k in (1, 2))
TRAJECTORY_HEADER = "t_s," + ",".join(CHANNELS)


@dataclass(frozen=True)
class GaitParams:
    name: str
    step_length: float
    step_height: float
    body_height: float
    frequency: float
    duty: float
    phase_offsets: tuple = (0.0, 0.5, 0.5, 0.0)
    elbow: tuple = (Branch.ELBOW_MINUS,) * 4

    def __post_init__(self):
        if not self.frequency > 0:
            raise InvalidParams(f"frequency must be > 0, got {self.frequency}")
        if not 0 < self.duty < 1:
            raise InvalidParams(f"duty must lie in (0, 1), got {self.duty}")
        if self.step_length < 0 or self.step_height < 0 or self.body_height < 0:
            raise InvalidParams("step_length, step_height and body_height must be >= 0")
        offsets = tuple(float(p) for p in self.phase_offsets)
        if len(offsets) != 4 or not all(0 <= p < 1 for p in offsets):
            raise InvalidParams(f"need four phase offsets in [0, 1), got {self.phase_offsets}")
        elbow = self.elbow
        if isinstance(elbow, (str, Branch)):
            elbow = (elbow,) * 4
        elbow = tuple(Branch.parse(e) for e in elbow)
        if len(elbow) != 4:
            raise InvalidParams("need one elbow branch per leg")
        object.__setattr__(self, "phase_offsets", offsets)
        object.__setattr__(self, "elbow", elbow)

    @property
    def period(self) -> float:
        return 1.0 / self.frequency

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "step_length": self.step_length,
            "step_height": self.step_height,
            "body_height": self.body_height,
            "frequency": self.frequency,
            "duty": self.duty,
            "phase_offsets": list(self.phase_offsets),
            "elbow": ["+" if e is Branch.ELBOW_PLUS else "-" for e in self.elbow],
        }

    @classmethod
    def from_dict(cls, name: str, data: Mapping) -> "GaitParams":
        kwargs = dict(data)
        kwargs.setdefault("name", name)
        if "phase_offsets" in kwargs:
            kwargs["phase_offsets"] = tuple(kwargs["phase_offsets"])
        if "elbow" in kwargs and not isinstance(kwargs["elbow"], str):
            kwargs["elbow"] = tuple(kwargs["elbow"])
        return cls(**kwargs)


TROT_PHASES = (0.0, 0.5, 0.5, 0.0)
CRAWL_PHASES = (0.0, 0.5, 0.25, 0.75)

# Toolkit defaults sized for l1 = l2 = 29 mm, tuned for plausible speeds
# rather than copied from any hardware run.
PRESETS = {
    "slow_trot": GaitParams("slow_trot", 0.030, 0.010, 0.040, 2.0, 0.5, TROT_PHASES),
    "fast_trot": GaitParams("fast_trot", 0.046, 0.012, 0.040, 5.0, 0.5, TROT_PHASES),
    "high_trot": GaitParams("high_trot", 0.032, 0.012, 0.050, 2.5, 0.5, TROT_PHASES),
    "crawl": GaitParams("crawl", 0.0225, 0.010, 0.040, 1.0, 0.75, CRAWL_PHASES),
    "low_crawl": GaitParams(
        "low_crawl", 0.020, 0.006, 0.012, 1.0, 0.75, CRAWL_PHASES,
        elbow=(Branch.ELBOW_PLUS, Branch.ELBOW_PLUS, Branch.ELBOW_MINUS, Branch.ELBOW_MINUS),
    ),
}


@dataclass(frozen=True)
class GaitSpec:
    """A gait: parameters plus the foot-path family they drive.

    ``path`` is ``"stroke"`` (line stance + half-ellipse swing) or
    ``"circle"`` (hip-centred circle of ``radius``, one lap per cycle).
    """

    params: GaitParams
    path: str = "stroke"
    radius: float = 0.0

    def local_phase(self, leg: LegId, phase: float) -> float:
        return (phase - self.params.phase_offsets[LegId.parse(leg).value]) % 1.0

    def in_stance(self, leg: LegId, phase: float) -> bool:
        return self.path == "stroke" and self.local_phase(leg, phase) < self.params.duty

    def to_dict(self) -> dict:
        out = {"path": self.path, "params": self.params.to_dict()}
        if self.path == "circle":
            out["radius"] = self.radius
        return out


def stroke_point(params: GaitParams, s: float) -> FootPoint:
    """Foot point at local phase ``s`` in [0, 1) of the stroke family."""
    half = params.step_length / 2.0
    y0 = -params.body_height
    if s < params.duty:
        u = s / params.duty
        return FootPoint(half - params.step_length * u, y0)
    u = (s - params.duty) / (1.0 - params.duty)
    return FootPoint(-half * math.cos(math.pi * u), y0 + params.step_height * math.sin(math.pi * u))


def stroke_points(params: GaitParams, s):
    s = np.asarray(s, dtype=float)
    half = params.step_length / 2.0
    y0 = -params.body_height
    stance = s < params.duty
    u_st = s / params.duty
    u_sw = (s - params.duty) / (1.0 - params.duty)
    x = np.where(stance, half - params.step_length * u_st, -half * np.cos(np.pi * u_sw))
    y = np.where(stance, y0, y0 + params.step_height * np.sin(np.pi * u_sw))
    return x, y


def make_gait(params: GaitParams, geom: LegGeometry = legkin.DEFAULT_GEOMETRY) -> GaitSpec:
    """Build the stroke gait for ``params``, rejecting strokes the leg cannot reach."""
    reach = geom.reach
    if params.body_height >= reach:
        raise InvalidParams(
            f"body_height {params.body_height:.6g} m is not below leg reach {reach:.6g} m"
        )
    chord = 2.0 * math.sqrt(reach**2 - params.body_height**2)
    if params.step_length > chord:
        raise InvalidParams(
            f"step_length {params.step_length:.6g} m exceeds the workspace chord "
            f"{chord:.6g} m at body height {params.body_height:.6g} m"
        )
    return GaitSpec(params)


def preset(name: str, presets: Mapping[str, GaitParams] = PRESETS, **overrides) -> GaitParams:
    try:
        params = presets[name]
    except KeyError:
        raise InvalidParams(f"unknown gait preset {name!r}; known: {sorted(presets)}") from None
    return replace(params, **overrides) if overrides else params


def circle_gait(radius: float, frequency: float, elbow=Branch.ELBOW_MINUS,
                phase_offsets: Sequence[float] = TROT_PHASES) -> GaitSpec:
    """Every foot laps a hip-centred circle once per cycle (counter-clockwise)."""
    params = GaitParams("circle", 0.0, 0.0, radius, frequency, 0.5, tuple(phase_offsets), elbow)
    return GaitSpec(params, path="circle", radius=radius)


def sample_foot(spec: GaitSpec, leg: LegId, phase: float) -> FootPoint:
    s = spec.local_phase(leg, phase)
    if spec.path == "circle":
        a = TWO_PI * s - math.pi / 2.0
        return FootPoint(spec.radius * math.cos(a), spec.radius * math.sin(a))
    return stroke_point(spec.params, s)


def sample_feet(spec: GaitSpec, leg: LegId, phases):
    """Vectorised :func:`sample_foot`."""
    s = (np.asarray(phases, dtype=float) - spec.params.phase_offsets[LegId.parse(leg).value]) % 1.0
    if spec.path == "circle":
        a = TWO_PI * s - np.pi / 2.0
        return spec.radius * np.cos(a), spec.radius * np.sin(a)
    return stroke_points(spec.params, s)


@dataclass
class ActuatorTrajectory:
    """Fixed-rate stream of the eight actuator angles, columns in ``CHANNELS`` order."""

    dt: float
    samples: np.ndarray = field(default_factory=lambda: np.zeros((0, 8)))

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float).reshape(-1, 8)

    def __len__(self):
        return len(self.samples)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) * self.dt

    @property
    def duration(self) -> float:
        return max(len(self.samples) - 1, 0) * self.dt

    def leg(self, leg: LegId) -> np.ndarray:
        k = LegId.parse(leg).value
        return self.samples[:, 2 * k:2 * k + 2]

    def max_step(self) -> float:
        if len(self.samples) < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(self.samples, axis=0))))

    def check_speed(self, omega_max: float) -> None:
        step = self.max_step()
        limit = omega_max * self.dt
        if step > limit * (1.0 + 1e-12):
            raise SpeedViolation(
                f"actuator step {step:.6g} rad exceeds omega_max*dt = {limit:.6g} rad "
                f"({step / self.dt:.6g} rad/s > {omega_max:.6g} rad/s)"
            )

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(TRAJECTORY_HEADER + "\n")
        for t, row in zip(self.times, self.samples):
            out.write(",".join(repr(float(v)) for v in (t, *row)) + "\n")
        return out.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ActuatorTrajectory":
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines or lines[0].strip() != TRAJECTORY_HEADER:
            raise ValueError("trajectory CSV must start with header " + TRAJECTORY_HEADER)
        rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]]).reshape(-1, 9)
        dt = float(rows[1, 0] - rows[0, 0]) if len(rows) > 1 else 0.0
        return cls(dt, rows[:, 1:])


def _initial_vector(initial) -> np.ndarray | None:
    if initial is None:
        return None
    if isinstance(initial, Mapping):
        initial = [initial[leg] for leg in LEGS]
    return np.asarray(initial, dtype=float).reshape(8)


def unwrap_toward(raw: np.ndarray, initial: np.ndarray | None = None) -> np.ndarray:
    """Shift each column by multiples of 2*pi so successive samples differ by <= pi.

    With ``initial`` the first row is pulled to the branch nearest that pose.
    """
    raw = np.asarray(raw, dtype=float)
    if initial is None or len(raw) == 0:
        return np.unwrap(raw, axis=0)
    stacked = np.unwrap(np.vstack([initial, raw]), axis=0)
    return stacked[1:]


def gait_to_actuator(spec: GaitSpec, geom: LegGeometry, dt: float, cycles: int = 1,
                     initial=None, omega_max: float = DEFAULT_OMEGA_MAX) -> ActuatorTrajectory:
    """Sample ``cycles`` periods at ``dt`` (both endpoints included) and solve IK per sample."""
    if dt <= 0:
        raise InvalidParams("dt must be > 0")
    n = int(round(cycles * spec.params.period / dt))
    phases = np.arange(n + 1) * dt * spec.params.frequency
    raw = np.empty((n + 1, 8))
    for leg in LEGS:
        x, y = sample_feet(spec, leg, phases)
        q1, q2, _ = legkin.inverse_kinematics_array(geom, x, y, spec.params.elbow[leg.value])
        raw[:, 2 * leg.value] = q1
        raw[:, 2 * leg.value + 1] = q1 + q2
    traj = ActuatorTrajectory(dt, unwrap_toward(raw, _initial_vector(initial)))
    traj.check_speed(omega_max)
    return traj


@dataclass(frozen=True)
class RotaryCommand:
    """Velocity-mode command: every actuator spins at ``omega`` from ``posture``."""

    omega: float
    posture: JointAngles

    @property
    def velocities(self) -> tuple:
        return (self.omega,) * 8

    @property
    def joint_rates(self) -> JointAngles:
        # q = A theta, so equal actuator rates leave the knee angle fixed
        return legkin.actuator_to_joint(ActuatorAngles(self.omega, self.omega))

    def rim_speed(self, geom: LegGeometry) -> float:
        return abs(self.omega) * geom.reach

    def to_dict(self) -> dict:
        return {
            "omega": self.omega,
            "velocities": list(self.velocities),
            "posture": {"q1": self.posture.q1, "q2": self.posture.q2},
        }


def rotary_command(omega: float, geom: LegGeometry = legkin.DEFAULT_GEOMETRY) -> RotaryCommand:
    """Straight-leg spoke mode: q2 = 0, leg pointing down, both actuators at ``omega``."""
    if not math.isfinite(omega):
        raise InvalidParams(f"omega must be finite, got {omega}")
    return RotaryCommand(float(omega), JointAngles(-math.pi / 2.0, 0.0))


def shortest_delta(delta):
    """Reduce angle differences into (-pi, pi]."""
    return -((np.pi - np.asarray(delta, dtype=float)) % TWO_PI - np.pi)


def mirror_pose(act: ActuatorAngles) -> ActuatorAngles:
    """Actuator angles of the mirrored stance q -> -q (feet reflected across the body plane)."""
    return legkin.joint_to_actuator(JointAngles(*(-np.asarray(legkin.actuator_to_joint(act)))))


def flip_recovery(current, dt: float, omega_max: float = DEFAULT_OMEGA_MAX,
                  time_limit: float = FLIP_TIME_LIMIT) -> ActuatorTrajectory:
    """Swing every leg to its mirrored stance along the shortest continuous path.

    ``current`` maps each leg to its actuator angles (or is a sequence in
    FL, FR, RL, RR order).  All channels move linearly and finish together;
    an already-mirrored pose gives an empty trajectory.
    """
    if dt <= 0:
        raise InvalidParams("dt must be > 0")
    start = _initial_vector(current)
    target = np.concatenate([mirror_pose(ActuatorAngles(*start[2 * k:2 * k + 2])) for k in range(4)])
    delta = shortest_delta(target - start)
    delta = np.where(np.abs(delta) < 1e-12, 0.0, delta)
    travel = float(np.max(np.abs(delta)))
    if travel == 0.0:
        return ActuatorTrajectory(dt)
    steps = math.ceil(travel / (omega_max * dt) - 1e-9)
    if steps * dt > time_limit:
        raise SpeedViolation(
            f"flip needs {steps * dt:.6g} s at omega_max={omega_max:.6g} rad/s, "
            f"limit is {time_limit:.6g} s"
        )
    frac = np.arange(steps + 1)[:, None] / steps
    traj = ActuatorTrajectory(dt, start + frac * delta)
    traj.check_speed(omega_max)
    return traj


def trajectory_feet(traj: ActuatorTrajectory, geom: LegGeometry, row: int = -1) -> dict:
    """Foot point of each leg at one sample of ``traj``."""
    out = {}
    for leg in LEGS:
        t1, t2 = traj.leg(leg)[row]
        out[leg] = legkin.forward_kinematics_actuator(geom, ActuatorAngles(t1, t2))
    return out
