"""``miniq`` command line.

Every subcommand prints one JSON document on stdout.  Rasters, trajectories
and sweeps go to ``--out``; ``--figure`` additionally renders a PNG.
Exit status: 0 success, 1 domain error (JSON error object on stderr),
2 usage, parse or configuration error.

Angles on the command line are radians and accept ``pi`` forms such as
``pi/2`` or ``-0.5pi``.  Values starting with ``-`` need ``--flag=-1,2``.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys

import numpy as np

from . import gait as gaitmod
from . import keyframes, legkin, metrics, sim, workspace
from .config import ToolConfig, load_config
from .errors import ConfigError, MiniQError
from .legkin import ActuatorAngles, Branch, FootPoint, JointAngles, LegGeometry

_PI_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)\*?pi(?:/(\d+\.?\d*))?$")


def parse_number(text: str) -> float:
    text = text.strip().lower()
    m = _PI_RE.match(text)
    if m:
        coef = m.group(1)
        value = math.pi * (float(coef) if coef not in ("", "+", "-") else (-1.0 if coef == "-" else 1.0))
        if m.group(2):
            value /= float(m.group(2))
        return value
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated values, got {text!r}")
    return parse_number(parts[0]), parse_number(parts[1])


def number_list(text: str) -> list[float]:
    return [parse_number(p) for p in text.split(",") if p.strip()]


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _write(path: str, data) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(path, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as fh:
        fh.write(data)


def _write_raster(path: str, data) -> None:
    if path.lower().endswith(".pgm"):
        _write(path, workspace.grid_to_pgm(data))
    else:
        _write(path, workspace.grid_to_csv(data))


def _grid(args, geom: LegGeometry) -> workspace.GridSpec:
    half = args.half_width if args.half_width else 1.1 * geom.reach
    return workspace.GridSpec.square(half, args.resolution)


# -- kinematics ---------------------------------------------------------------

def cmd_ik(args, cfg: ToolConfig) -> dict:
    sol = legkin.inverse_kinematics(cfg.robot.geom, FootPoint(*args.target), Branch.parse(args.branch))
    return {
        "q1": sol.joints.q1, "q2": sol.joints.q2,
        "theta1": sol.actuators.theta1, "theta2": sol.actuators.theta2,
        "branch": sol.branch.name, "d": sol.d,
    }


def cmd_fk(args, cfg: ToolConfig) -> dict:
    geom = cfg.robot.geom
    if args.theta is not None:
        p = legkin.forward_kinematics_actuator(geom, ActuatorAngles(*args.theta))
    else:
        p = legkin.forward_kinematics(geom, JointAngles(*args.q))
    return {"x": p.x, "y": p.y}


def _joints(args) -> JointAngles:
    if args.theta is not None:
        return legkin.actuator_to_joint(ActuatorAngles(*args.theta))
    return JointAngles(*args.q)


def cmd_jac(args, cfg: ToolConfig) -> dict:
    pair_ = legkin.jacobians(cfg.robot.geom, _joints(args))
    return {
        "j_q": pair_.j_q.tolist(),
        "j_theta": pair_.j_theta.tolist(),
        "det_j_q": float(np.linalg.det(pair_.j_q)),
        "det_j_theta": float(np.linalg.det(pair_.j_theta)),
    }


def cmd_manip(args, cfg: ToolConfig) -> dict:
    geom, joints = cfg.robot.geom, _joints(args)
    return {
        "w": legkin.manipulability(geom, joints),
        "w_joint": legkin.manipulability(geom, joints, "joint"),
        "w_actuator": legkin.manipulability(geom, joints, "actuator"),
        "w_analytic": geom.l1 * geom.l2 * abs(math.sin(joints.q2)),
    }


# -- workspace ----------------------------------------------------------------

def cmd_workspace(args, cfg: ToolConfig) -> dict:
    geom = cfg.robot.geom
    spec = _grid(args, geom)
    if args.kind == "fivebar":
        grid = workspace.fivebar_workspace(cfg.fivebar, spec, args.samples)
        analytic = None
    else:
        grid = workspace.serial_workspace(geom, spec)
        analytic = math.pi * (geom.reach**2 - geom.inner_radius**2)
    if args.out:
        _write_raster(args.out, grid)
    if args.figure:
        from . import plotting
        empty = workspace.WorkspaceGrid(spec, np.zeros_like(grid.reachable))
        plotting.workspace_overlay(grid, empty, args.figure)
    return {
        "kind": args.kind,
        "area": grid.area,
        "analytic_area": analytic,
        "reachable_cells": int(np.count_nonzero(grid.reachable)),
        "cell_area": grid.cell_area,
        "resolution": spec.resolution,
    }


def cmd_manip_map(args, cfg: ToolConfig) -> dict:
    geom = cfg.robot.geom
    spec = _grid(args, geom)
    field = workspace.manipulability_map(geom, spec, Branch.parse(args.branch))
    if args.out:
        _write_raster(args.out, field)
    if args.figure:
        from . import plotting
        panels = {
            "joint space (q1, q2)": workspace.configuration_manipulability(geom, 181, "joint"),
            "actuator space (theta1, theta2)": workspace.configuration_manipulability(geom, 181, "actuator"),
        }
        plotting.manipulability_panels(field, panels, args.figure)
    return {
        "peak": float(np.nanmax(field.values)),
        "argmax_radius": field.argmax_radius(),
        "analytic_peak": geom.l1 * geom.l2,
        "analytic_radius": math.hypot(geom.l1, geom.l2),
        "cell_width": spec.dx,
    }


def cmd_compare(args, cfg: ToolConfig) -> dict:
    geom = cfg.robot.geom
    spec = _grid(args, geom)
    serial = workspace.serial_workspace(geom, spec)
    five = workspace.fivebar_workspace(cfg.fivebar, spec, args.samples)
    report = workspace.compare_workspaces(serial, five)
    if args.out:
        _write_raster(args.out, workspace.ScalarField(spec, serial.reachable + five.reachable.astype(float)))
    if args.figure:
        from . import plotting
        plotting.workspace_overlay(serial, five, args.figure)
    return report.to_dict()


# -- gait ---------------------------------------------------------------------

def _emit_trajectory(args, traj, title) -> None:
    if args.out:
        _write(args.out, traj.to_csv())
    if args.figure:
        from . import plotting
        plotting.trajectory_plot(traj, args.figure, title)


def _traj_summary(traj) -> dict:
    return {
        "samples": len(traj),
        "dt": traj.dt,
        "duration": traj.duration,
        "max_step": traj.max_step(),
        "start": traj.samples[0].tolist() if len(traj) else [],
        "end": traj.samples[-1].tolist() if len(traj) else [],
    }


def cmd_gait_synth(args, cfg: ToolConfig) -> dict:
    geom = cfg.robot.geom
    omega_max = cfg.motor.no_load_speed
    if args.circle is not None:
        spec = gaitmod.circle_gait(args.circle * geom.reach, args.frequency or 1.0)
    else:
        params = cfg.gait(args.gait)
        if args.frequency:
            params = gaitmod.GaitParams.from_dict(params.name, {**params.to_dict(), "frequency": args.frequency})
        spec = gaitmod.make_gait(params, geom)
    traj = gaitmod.gait_to_actuator(spec, geom, args.dt, args.cycles, omega_max=omega_max)
    _emit_trajectory(args, traj, spec.params.name)
    return {"gait": spec.to_dict(), "trajectory": _traj_summary(traj)}


def cmd_gait_flip(args, cfg: ToolConfig) -> dict:
    poses = args.q or [(-math.pi / 2.0, math.pi / 2.0)]
    if len(poses) == 1:
        poses = poses * 4
    if len(poses) != 4:
        raise ConfigError("give --q once (all legs) or four times (FL, FR, RL, RR)")
    current = [legkin.joint_to_actuator(JointAngles(*p)) for p in poses]
    traj = gaitmod.flip_recovery(current, args.dt, cfg.motor.no_load_speed)
    _emit_trajectory(args, traj, "flip recovery")
    out = _traj_summary(traj)
    out["time_limit"] = gaitmod.FLIP_TIME_LIMIT
    return out


def cmd_gait_script(args, cfg: ToolConfig) -> dict:
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            frames = keyframes.parse_script(fh.read())
    else:
        frames = keyframes.load_builtin(args.name)
    traj = keyframes.script_to_trajectory(frames, cfg.robot.geom, args.dt, cfg.motor.no_load_speed)
    _emit_trajectory(args, traj, args.name or os.path.basename(args.file))
    return _traj_summary(traj)


# -- simulation ---------------------------------------------------------------

def cmd_sim_gait(args, cfg: ToolConfig) -> dict:
    spec = gaitmod.make_gait(cfg.gait(args.gait), cfg.robot.geom)
    if args.sweep:
        rows = sim.sweep_gait(spec, cfg.robot, cfg.motor, args.sweep, args.values or [])
        if args.out:
            _write(args.out, sim.sweep_to_csv(rows))
        if args.figure:
            from . import plotting
            plotting.sweep_plot(rows, args.figure)
        return {"sweep": rows}
    res = sim.simulate_gait(spec, cfg.robot, cfg.motor)
    if args.out:
        _write(args.out, json.dumps(res.to_dict()))
    out = res.summary()
    out["gait"] = args.gait
    return out


def cmd_sim_rotary(args, cfg: ToolConfig) -> dict:
    cmd = gaitmod.rotary_command(args.omega, cfg.robot.geom)
    res = sim.simulate_rotary(cmd, cfg.robot, cfg.motor)
    if args.out:
        _write(args.out, json.dumps(res.to_dict()))
    out = res.summary()
    out["command"] = cmd.to_dict()
    return out


# -- metrics ------------------------------------------------------------------

def cmd_metrics(args, cfg: ToolConfig) -> dict:
    log = metrics.load_telemetry(args.log)
    robot = cfg.robot
    current = metrics.average_current(log)
    stab = metrics.stability(log)
    out = {
        "samples": len(log),
        "duration": float(log.t[-1] - log.t[0]),
        "avg_current": current,
        "pitch_std": stab.pitch_std,
        "roll_std": stab.roll_std,
    }
    if args.v is not None:
        out["v_ss"] = args.v
        out["normalized_v"] = metrics.normalized_speed(args.v, robot.body_length)
        out["cot"] = metrics.cost_of_transport(
            metrics.EnergyInput(robot.bus_voltage, current, robot.mass, args.v, robot.gravity)
        )
    if args.figure:
        from . import plotting
        plotting.telemetry_plot(log, args.figure)
    return out


def cmd_config(args, cfg: ToolConfig) -> dict:
    return cfg.to_dict()


def cmd_report(args, cfg: ToolConfig) -> dict:
    """Render the standard figure set plus the matching delimited files into ``--out``."""
    from . import plotting

    out_dir = args.out or "miniq-report"
    os.makedirs(out_dir, exist_ok=True)
    geom = cfg.robot.geom
    spec = workspace.GridSpec.square(1.1 * geom.reach, args.resolution)
    serial = workspace.serial_workspace(geom, spec)
    five = workspace.fivebar_workspace(cfg.fivebar, spec, args.samples)
    field = workspace.manipulability_map(geom, spec)
    files = {}

    def put(name, data):
        path = os.path.join(out_dir, name)
        _write(path, data)
        files[name] = path

    put("workspace_serial.pgm", workspace.grid_to_pgm(serial))
    put("workspace_fivebar.pgm", workspace.grid_to_pgm(five))
    put("manipulability.csv", workspace.grid_to_csv(field))
    for space in ("joint", "actuator"):
        _, counts = workspace.projected_manipulability(geom, spec, 181, space)
        put(f"density_{space}.csv", workspace.grid_to_csv(workspace.ScalarField(spec, counts.astype(float))))
    files["workspace.png"] = plotting.workspace_overlay(serial, five, os.path.join(out_dir, "workspace.png"))
    panels = {
        "joint space (q1, q2)": workspace.configuration_manipulability(geom, 181, "joint"),
        "actuator space (theta1, theta2)": workspace.configuration_manipulability(geom, 181, "actuator"),
    }
    files["manipulability.png"] = plotting.manipulability_panels(
        field, panels, os.path.join(out_dir, "manipulability.png"))

    rows = []
    for name, params in sorted(cfg.gaits.items()):
        row = {"param": "gait", "value": name}
        try:
            res = sim.simulate_gait(gaitmod.make_gait(params, geom), cfg.robot, cfg.motor)
            row.update(res.summary())
            row["error"] = ""
        except MiniQError as exc:
            row["error"] = exc.name
        rows.append(row)
    put("gaits.csv", sim.sweep_to_csv(rows))
    circle = gaitmod.circle_gait(0.9 * geom.reach, 1.0)
    traj = gaitmod.gait_to_actuator(circle, geom, 0.005, 3, omega_max=cfg.motor.no_load_speed)
    put("circle_trajectory.csv", traj.to_csv())
    files["circle_trajectory.png"] = plotting.trajectory_plot(
        traj, os.path.join(out_dir, "circle_trajectory.png"), "hip-centred circle")
    comp = workspace.compare_workspaces(serial, five)
    return {"files": dict(sorted(files.items())), "comparison": comp.to_dict(), "gaits": rows}


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def global_flags(default):
        p = argparse.ArgumentParser(add_help=False)
        p.add_argument("--config", default=default,
                       help="ToolConfig JSON (default ./miniq.json or $MINIQ_CONFIG)")
        p.add_argument("--geom", type=pair, metavar="L1,L2", default=default,
                       help="override leg link lengths (m)")
        return p

    # subcommands must not reset flags given before the subcommand name
    common = global_flags(argparse.SUPPRESS)
    parser = argparse.ArgumentParser(prog="miniq", description="MiNI-Q leg kinematics and locomotion toolkit",
                                     parents=[global_flags(None)])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, parent=sub):
        p = parent.add_parser(name, help=help_, parents=[common])
        p.set_defaults(func=func)
        return p

    def angles(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--q", type=pair, metavar="Q1,Q2", help="joint angles (rad)")
        g.add_argument("--theta", type=pair, metavar="T1,T2", help="actuator angles (rad)")

    def grid(p, resolution=401):
        p.add_argument("--resolution", type=int, default=resolution)
        p.add_argument("--half-width", type=float, default=None, help="grid half width (m)")

    def outputs(p):
        p.add_argument("--out", help="output file")
        p.add_argument("--figure", help="render a PNG figure to this path")

    p = add("ik", cmd_ik, "inverse kinematics for a foot point")
    p.add_argument("--target", type=pair, required=True, metavar="X,Y")
    p.add_argument("--branch", default="+", help="elbow branch: + or -")

    angles(add("fk", cmd_fk, "forward kinematics"))
    angles(add("jac", cmd_jac, "joint and actuator Jacobians"))
    angles(add("manip", cmd_manip, "Yoshikawa manipulability"))

    p = add("workspace", cmd_workspace, "rasterise a workspace")
    p.add_argument("--kind", choices=("serial", "fivebar"), default="serial")
    p.add_argument("--samples", type=int, default=256, help="five-bar samples per actuator axis")
    grid(p)
    outputs(p)

    p = add("manip-map", cmd_manip_map, "manipulability over the workspace")
    p.add_argument("--branch", default="+")
    grid(p)
    outputs(p)

    p = add("compare", cmd_compare, "serial vs five-bar workspace comparison")
    p.add_argument("--samples", type=int, default=256)
    grid(p, 201)
    outputs(p)

    g = sub.add_parser("gait", help="trajectory synthesis").add_subparsers(dest="gait_command", required=True)
    p = add("synth", cmd_gait_synth, "sample a gait into an actuator trajectory", g)
    p.add_argument("--gait", default="fast_trot")
    p.add_argument("--circle", type=float, default=None, metavar="FRACTION",
                   help="hip-centred circle of FRACTION * (l1 + l2) instead of a preset")
    p.add_argument("--frequency", type=float, default=None)
    p.add_argument("--dt", type=float, default=0.005)
    p.add_argument("--cycles", type=int, default=1)
    outputs(p)
    p = add("flip", cmd_gait_flip, "flip-recovery trajectory", g)
    p.add_argument("--q", type=pair, action="append", metavar="Q1,Q2",
                   help="current joint angles; once for all legs or four times")
    p.add_argument("--dt", type=float, default=0.005)
    outputs(p)
    p = add("script", cmd_gait_script, "sample a keyframe script", g)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--name", choices=keyframes.builtin_scripts())
    src.add_argument("--file")
    p.add_argument("--dt", type=float, default=0.005)
    outputs(p)

    s = sub.add_parser("sim", help="quasi-static simulation").add_subparsers(dest="sim_command", required=True)
    p = add("gait", cmd_sim_gait, "simulate a gait preset", s)
    p.add_argument("--gait", default="fast_trot")
    p.add_argument("--sweep", choices=sim.SWEEP_FIELDS + ("mass",))
    p.add_argument("--values", type=number_list, help="comma-separated sweep values")
    outputs(p)
    p = add("rotary", cmd_sim_rotary, "simulate continuous-rotation locomotion", s)
    p.add_argument("--omega", type=parse_number, required=True, help="actuator speed (rad/s)")
    p.add_argument("--out")

    p = add("metrics", cmd_metrics, "telemetry metrics: COT and stability")
    p.add_argument("--log", required=True, help="telemetry CSV")
    p.add_argument("--v", type=float, default=None, help="steady-state speed (m/s) for COT")
    p.add_argument("--figure")

    add("config", cmd_config, "print the effective configuration")

    p = add("report", cmd_report, "render the standard figures and tables into --out DIR")
    p.add_argument("--out", default="miniq-report")
    p.add_argument("--resolution", type=int, default=301)
    p.add_argument("--samples", type=int, default=256)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config)
        if args.geom:
            cfg = cfg.with_geometry(LegGeometry(*args.geom))
        result = args.func(args, cfg)
    except ConfigError as exc:
        stderr.write(_dump({"error": exc.name, "module": exc.module, "message": str(exc)}) + "\n")
        return 2
    except MiniQError as exc:
        stderr.write(_dump({"error": exc.name, "module": exc.module, "message": str(exc)}) + "\n")
        return 1
    except (ValueError, OSError) as exc:
        stderr.write(_dump({"error": type(exc).__name__, "module": "cli", "message": str(exc)}) + "\n")
        return 2
    stdout.write(_dump(result) + "\n")
    return 0


def main() -> None:
    sys.exit(run())
