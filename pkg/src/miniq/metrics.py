"""Run metrics from telemetry: cost of transport, stability, normalised speed.

Telemetry CSV (UTF-8, ``.`` decimal, ``#`` comment lines)::

    t_s,roll_deg,pitch_deg,yaw_deg,current_a
    0.00,0.1,-0.3,12.0,1.41

Column order is free; extra columns are ignored.  Angles stay in degrees.
"""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import EmptyLog, ParseError, ZeroVelocity

TELEMETRY_COLUMNS = ("t_s", "roll_deg", "pitch_deg", "yaw_deg", "current_a")
DEFAULT_GRAVITY = 9.81


@dataclass(frozen=True)
class TelemetryLog:
    t: np.ndarray
    roll: np.ndarray
    pitch: np.ndarray
    yaw: np.ndarray
    current: np.ndarray

    def __post_init__(self):
        if len(self.t) < 2:
            raise EmptyLog(f"telemetry needs at least 2 samples, got {len(self.t)}")
        if np.any(np.diff(self.t) <= 0):
            raise ParseError("timestamps must be strictly increasing")

    def __len__(self):
        return len(self.t)

    @classmethod
    def from_arrays(cls, t, roll, pitch, yaw=None, current=None) -> "TelemetryLog":
        t = np.asarray(t, dtype=float)
        zeros = np.zeros_like(t)
        return cls(
            t,
            np.asarray(roll, dtype=float),
            np.asarray(pitch, dtype=float),
            zeros if yaw is None else np.asarray(yaw, dtype=float),
            zeros if current is None else np.asarray(current, dtype=float),
        )

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join(TELEMETRY_COLUMNS) + "\n")
        for row in zip(self.t, self.roll, self.pitch, self.yaw, self.current):
            out.write(",".join(repr(float(v)) for v in row) + "\n")
        return out.getvalue()


@dataclass(frozen=True)
class EnergyInput:
    voltage: float
    avg_current: float
    mass: float
    v_ss: float
    gravity: float = DEFAULT_GRAVITY


@dataclass(frozen=True)
class StabilityReport:
    pitch_std: float
    roll_std: float


def _text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def load_telemetry(source) -> TelemetryLog:
    """Parse telemetry from a path, raw text/bytes, or an open (binary or text) stream."""
    lines = (ln for ln in io.StringIO(_text(source)) if ln.strip() and not ln.lstrip().startswith("#"))
    reader = csv.reader(lines)
    header = next(reader, None)
    if header is None:
        raise EmptyLog("telemetry is empty")
    header = [h.strip() for h in header]
    missing = [c for c in TELEMETRY_COLUMNS if c not in header]
    if missing:
        raise ParseError(f"telemetry header lacks column(s) {missing}; expected {list(TELEMETRY_COLUMNS)}")
    idx = [header.index(c) for c in TELEMETRY_COLUMNS]
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(header):
            raise ParseError(f"data row {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            values = [float(row[i]) for i in idx]
        except ValueError:
            raise ParseError(f"data row {lineno}: non-numeric field in {row}") from None
        if not all(math.isfinite(v) for v in values):
            raise ParseError(f"data row {lineno}: non-finite value")
        if rows and values[0] <= rows[-1][0]:
            raise ParseError(f"data row {lineno}: time {values[0]} does not increase")
        rows.append(values)
    if len(rows) < 2:
        raise EmptyLog(f"telemetry needs at least 2 samples, got {len(rows)}")
    cols = np.array(rows).T
    return TelemetryLog(*cols)


def stability(log: TelemetryLog) -> StabilityReport:
    """Population standard deviation of pitch and roll, in degrees."""
    if len(log.t) < 2:
        raise EmptyLog("stability needs at least 2 samples")
    return StabilityReport(float(np.std(log.pitch)), float(np.std(log.roll)))


def average_current(log: TelemetryLog) -> float:
    """Time-weighted (trapezoidal) mean current over the log span."""
    if len(log.t) < 2:
        raise EmptyLog("average_current needs at least 2 samples")
    span = log.t[-1] - log.t[0]
    # integrate the deviation from the first sample so a constant trace is exact
    ref = log.current[0]
    return float(ref + np.trapezoid(log.current - ref, log.t) / span)


def cost_of_transport(voltage, avg_current=None, mass=None, gravity=DEFAULT_GRAVITY, v_ss=None) -> float:
    """Electrical power over weight times speed, V*i / (m*g*v).

    Accepts an :class:`EnergyInput` or the five quantities positionally
    ``(V, i, m, g, v_ss)``.
    """
    if isinstance(voltage, EnergyInput):
        e = voltage
        voltage, avg_current, mass, gravity, v_ss = e.voltage, e.avg_current, e.mass, e.gravity, e.v_ss
    if not v_ss > 0:
        raise ZeroVelocity(f"cost of transport needs v_ss > 0, got {v_ss}")
    return voltage * avg_current / (mass * gravity * v_ss)


def normalized_speed(v: float, body_length: float) -> float:
    """Speed in body lengths per second."""
    if not body_length > 0:
        raise ValueError("body_length must be positive")
    return v / body_length
