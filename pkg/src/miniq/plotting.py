"""Figure rendering for the report paths of the CLI.

Everything draws through the Agg backend straight to files; nothing here is
needed by the numerical modules.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .gait import CHANNELS, ActuatorTrajectory  # noqa: E402
from .workspace import ScalarField, WorkspaceGrid  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "figure.dpi": 120,
    "savefig.bbox": "tight",
}


def _extent(spec, scale=1.0):
    return [spec.x_min * scale, spec.x_max * scale, spec.y_min * scale, spec.y_max * scale]


def _save(fig, path):
    fig.savefig(path)
    plt.close(fig)
    return path


def workspace_overlay(serial: WorkspaceGrid, baseline: WorkspaceGrid, path, scale=100.0, unit="cm"):
    """Serial-leg workspace with the five-bar workspace drawn on top."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.2, 4.2))
        ext = _extent(serial.spec, scale)
        ax.imshow(np.where(serial.reachable, 1.0, np.nan), origin="lower", extent=ext,
                  cmap="Blues", vmin=0, vmax=1.6, alpha=0.8)
        ax.imshow(np.where(baseline.reachable, 1.0, np.nan), origin="lower", extent=ext,
                  cmap="Oranges", vmin=0, vmax=1.2, alpha=0.9)
        ax.plot([0], [0], "k+", ms=8)
        handles = [plt.Rectangle((0, 0), 1, 1, color="tab:blue", alpha=0.5),
                   plt.Rectangle((0, 0), 1, 1, color="tab:orange")]
        ax.legend(handles, ["serial 2R", "five-bar"], loc="upper right")
        ax.set_xlabel(f"x [{unit}]")
        ax.set_ylabel(f"y [{unit}]")
        ax.set_aspect("equal")
        return _save(fig, path)


def manipulability_panels(field: ScalarField, config_fields: dict, path, scale=100.0, unit="cm"):
    """Cartesian manipulability map next to the configuration-space maps.

    ``config_fields`` maps a panel title to ``(axis, values)`` as returned
    by :func:`miniq.workspace.configuration_manipulability`.
    """
    n = 1 + len(config_fields)
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, n, figsize=(3.6 * n, 3.4))
        axes = np.atleast_1d(axes)
        im = axes[0].imshow(field.values, origin="lower", extent=_extent(field.spec, scale), cmap="viridis")
        axes[0].set_title("workspace")
        axes[0].set_xlabel(f"x [{unit}]")
        axes[0].set_ylabel(f"y [{unit}]")
        fig.colorbar(im, ax=axes[0], shrink=0.8)
        for ax, (title, (axis, values)) in zip(axes[1:], config_fields.items()):
            lo, hi = axis[0], axis[-1]
            ax.imshow(values, origin="lower", extent=[lo, hi, lo, hi], cmap="viridis")
            ax.set_title(title)
            ax.set_xlabel("first angle [rad]")
            ax.set_ylabel("second angle [rad]")
        fig.tight_layout()
        return _save(fig, path)


def trajectory_plot(traj: ActuatorTrajectory, path, title=None):
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(2, 1, sharex=True, figsize=(6, 4.5))
        t = traj.times
        for k, name in enumerate(CHANNELS):
            ax = axes[k % 2]
            ax.plot(t, traj.samples[:, k], label=name[:2].upper())
        axes[0].set_ylabel("theta1 [rad]")
        axes[1].set_ylabel("theta2 [rad]")
        axes[1].set_xlabel("t [s]")
        axes[0].legend(ncol=4)
        if title:
            axes[0].set_title(title)
        return _save(fig, path)


def telemetry_plot(log, path):
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 4))
        ax1.plot(log.t, log.roll, label="roll")
        ax1.plot(log.t, log.pitch, label="pitch")
        ax1.set_ylabel("angle [deg]")
        ax1.legend()
        ax2.plot(log.t, log.current, color="tab:red")
        ax2.set_ylabel("current [A]")
        ax2.set_xlabel("t [s]")
        return _save(fig, path)


def sweep_plot(rows, path):
    """COT and speed against the swept parameter."""
    ok = [r for r in rows if not r.get("error")]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        if ok:
            x = [r["value"] for r in ok]
            ax.plot(x, [r["cot"] for r in ok], "o-", label="COT")
            ax.set_xlabel(ok[0]["param"])
            ax.set_ylabel("COT")
            ax2 = ax.twinx()
            ax2.plot(x, [r["v_ss"] for r in ok], "s--", color="tab:green", label="v_ss")
            ax2.set_ylabel("v_ss [m/s]")
        return _save(fig, path)
