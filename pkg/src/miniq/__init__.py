"""Kinematics, gait synthesis and locomotion analysis for a coupled 2R quadruped leg."""
from .errors import (
    DegenerateGeometry,
    EmptyLog,
    GridMismatch,
    InvalidParams,
    MiniQError,
    OverTorque,
    ParseError,
    SpeedViolation,
    Unreachable,
    ZeroVelocity,
)
from .legkin import (
    ActuatorAngles,
    Branch,
    FootPoint,
    JointAngles,
    LegGeometry,
    forward_kinematics,
    inverse_kinematics,
    manipulability,
)

__version__ = "0.1.0"
