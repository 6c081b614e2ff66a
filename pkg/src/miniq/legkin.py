"""Closed-form kinematics of the coupled 2R leg.

The hip actuator drives the proximal link directly; the knee actuator sits
on the body and drives the distal link through a belt, so the knee joint
angle is the *difference* of the two actuator angles::

    theta = A_inv @ q        A_inv = [[1, 0], [1, 1]]
    q     = A @ theta        A     = [[1, 0], [-1, 1]]

Angles are unbounded reals throughout this module; nothing is ever wrapped.
Coordinates: x forward, y up, gravity along -y.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import Unreachable

#: Tolerance on |D| - 1 below which a target is clamped onto the boundary.
CLAMP_EPS = 1e-12

COUPLING = np.array([[1.0, 0.0], [-1.0, 1.0]])
COUPLING_INV = np.array([[1.0, 0.0], [1.0, 1.0]])


@dataclass(frozen=True)
class LegGeometry:
    l1: float
    l2: float

    def __post_init__(self):
        if not (self.l1 > 0 and self.l2 > 0) or not math.isfinite(self.l1 + self.l2):
            raise ValueError(f"link lengths must be positive, got l1={self.l1}, l2={self.l2}")

    @property
    def reach(self) -> float:
        return self.l1 + self.l2

    @property
    def inner_radius(self) -> float:
        return abs(self.l1 - self.l2)


#: l1 + l2 = 5.8 cm of total reach, split evenly between the links.
DEFAULT_GEOMETRY = LegGeometry(0.029, 0.029)


class JointAngles(NamedTuple):
    q1: float
    q2: float


class ActuatorAngles(NamedTuple):
    theta1: float
    theta2: float


class FootPoint(NamedTuple):
    x: float
    y: float


class WrenchForce(NamedTuple):
    fx: float
    fy: float


class ActuatorTorques(NamedTuple):
    tau1: float
    tau2: float


class Branch(enum.Enum):
    """Sign of sqrt(1 - D^2) in the knee solution."""

    ELBOW_PLUS = 1
    ELBOW_MINUS = -1

    @property
    def sign(self) -> int:
        return self.value

    @classmethod
    def parse(cls, text: str | "Branch") -> "Branch":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        if key not in ("+", "-", "+1", "-1", "1"):
            key = key.replace("_", "").replace("-", "")
        aliases = {
            "+": cls.ELBOW_PLUS, "+1": cls.ELBOW_PLUS, "1": cls.ELBOW_PLUS,
            "plus": cls.ELBOW_PLUS, "elbowplus": cls.ELBOW_PLUS,
            "-": cls.ELBOW_MINUS, "-1": cls.ELBOW_MINUS,
            "minus": cls.ELBOW_MINUS, "elbowminus": cls.ELBOW_MINUS,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown elbow branch {text!r}") from None


@dataclass(frozen=True)
class IKSolution:
    joints: JointAngles
    actuators: ActuatorAngles
    branch: Branch
    d: float


@dataclass(frozen=True)
class JacobianPair:
    j_q: np.ndarray
    j_theta: np.ndarray


def joint_to_actuator(joints: JointAngles) -> ActuatorAngles:
    q1, q2 = joints
    return ActuatorAngles(q1, q1 + q2)


def actuator_to_joint(act: ActuatorAngles) -> JointAngles:
    t1, t2 = act
    return JointAngles(t1, t2 - t1)


def forward_kinematics(geom: LegGeometry, joints: JointAngles) -> FootPoint:
    q1, q2 = joints
    q12 = q1 + q2
    return FootPoint(
        geom.l1 * math.cos(q1) + geom.l2 * math.cos(q12),
        geom.l1 * math.sin(q1) + geom.l2 * math.sin(q12),
    )


def forward_kinematics_actuator(geom: LegGeometry, act: ActuatorAngles) -> FootPoint:
    return forward_kinematics(geom, actuator_to_joint(act))


def knee_cosine(geom: LegGeometry, x, y):
    """The intermediate D = cos(q2); works on scalars or arrays."""
    return (x * x + y * y - geom.l1**2 - geom.l2**2) / (2.0 * geom.l1 * geom.l2)


def inverse_kinematics(
    geom: LegGeometry, target: FootPoint, branch: Branch = Branch.ELBOW_PLUS
) -> IKSolution:
    x, y = target
    branch = Branch.parse(branch)
    d = knee_cosine(geom, x, y)
    if not math.isfinite(d) or abs(d) > 1.0 + CLAMP_EPS:
        raise Unreachable(
            f"target ({x:.6g}, {y:.6g}) outside reachable annulus "
            f"[{geom.inner_radius:.6g}, {geom.reach:.6g}] (D={d:.6g})"
        )
    d = min(1.0, max(-1.0, d))
    s = branch.sign * math.sqrt(1.0 - d * d)
    q2 = math.atan2(s, d)
    q1 = math.atan2(y, x) - math.atan2(geom.l2 * s, geom.l1 + geom.l2 * d)
    joints = JointAngles(q1, q2)
    return IKSolution(joints, joint_to_actuator(joints), branch, d)


def inverse_kinematics_array(geom: LegGeometry, x, y, branch: Branch = Branch.ELBOW_PLUS):
    """Vectorised IK. Returns ``(q1, q2, d)`` arrays; raises if any point is unreachable."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sign = Branch.parse(branch).sign
    d = knee_cosine(geom, x, y)
    bad = ~(np.abs(d) <= 1.0 + CLAMP_EPS)
    if np.any(bad):
        idx = np.flatnonzero(bad.ravel())[0]
        raise Unreachable(
            f"{int(bad.sum())} target(s) unreachable, first at "
            f"({x.ravel()[idx]:.6g}, {y.ravel()[idx]:.6g})"
        )
    d = np.clip(d, -1.0, 1.0)
    s = sign * np.sqrt(1.0 - d * d)
    q2 = np.arctan2(s, d)
    q1 = np.arctan2(y, x) - np.arctan2(geom.l2 * s, geom.l1 + geom.l2 * d)
    return q1, q2, d


def forward_kinematics_array(geom: LegGeometry, q1, q2):
    q1 = np.asarray(q1, dtype=float)
    q12 = q1 + np.asarray(q2, dtype=float)
    return (
        geom.l1 * np.cos(q1) + geom.l2 * np.cos(q12),
        geom.l1 * np.sin(q1) + geom.l2 * np.sin(q12),
    )


def jacobians(geom: LegGeometry, joints: JointAngles) -> JacobianPair:
    q1, q2 = joints
    s1, c1 = math.sin(q1), math.cos(q1)
    s12, c12 = math.sin(q1 + q2), math.cos(q1 + q2)
    l1, l2 = geom.l1, geom.l2
    j_q = np.array([
        [-l1 * s1 - l2 * s12, -l2 * s12],
        [l1 * c1 + l2 * c12, l2 * c12],
    ])
    return JacobianPair(j_q, j_q @ COUPLING)


def yoshikawa(jac: np.ndarray) -> float:
    """sqrt(det(J J^T)) for any Jacobian; |det J| when square."""
    jac = np.asarray(jac, dtype=float)
    if jac.shape[0] == jac.shape[1]:
        return abs(float(np.linalg.det(jac)))
    return math.sqrt(max(float(np.linalg.det(jac @ jac.T)), 0.0))


def link_frame_jacobians(geom: LegGeometry, joints: JointAngles) -> JacobianPair:
    """Jacobians expressed in the frame of the proximal link.

    This is R(q1)^T J; the rotation has unit determinant so the
    manipulability is unchanged, but every entry depends on q2 alone and
    the determinant keeps full relative precision near singularities.
    """
    _, q2 = joints
    s2, c2 = math.sin(q2), math.cos(q2)
    l1, l2 = geom.l1, geom.l2
    j_q = np.array([[-l2 * s2, -l2 * s2], [l1 + l2 * c2, l2 * c2]])
    return JacobianPair(j_q, j_q @ COUPLING)


def manipulability(geom: LegGeometry, joints: JointAngles, space: str = "joint") -> float:
    """Yoshikawa index of the leg; ``space`` picks j_q ("joint") or j_theta ("actuator")."""
    pair = link_frame_jacobians(geom, joints)
    jac = pair.j_q if space == "joint" else pair.j_theta
    return yoshikawa(jac)


def manipulability_array(geom: LegGeometry, q2):
    """Closed form l1*l2*|sin q2|, equal to the Yoshikawa index in either space."""
    return geom.l1 * geom.l2 * np.abs(np.sin(np.asarray(q2, dtype=float)))


def static_torques(geom: LegGeometry, joints: JointAngles, load: WrenchForce) -> ActuatorTorques:
    """Actuator torques (N*m) holding ``load`` at the foot: tau = J_theta^T F."""
    tau = jacobians(geom, joints).j_theta.T @ np.array([load[0], load[1]], dtype=float)
    return ActuatorTorques(float(tau[0]), float(tau[1]))
