"""Rasterised workspaces and manipulability fields.

Grids are cell-centred: with ``n = resolution`` cells per axis, cell ``(i, j)``
(row ``i`` along y, column ``j`` along x) has its centre at
``x_min + (j + 0.5) * dx``, ``y_min + (i + 0.5) * dy``.  A cell counts as
reachable iff its centre is reachable (serial leg) or a sampled toe position
falls inside it (five-bar).
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from . import legkin
from .errors import DegenerateGeometry, GridMismatch
from .legkin import Branch, LegGeometry


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    resolution: int

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("grid bounds must satisfy x_max > x_min and y_max > y_min")
        if int(self.resolution) != self.resolution or self.resolution < 2:
            raise ValueError(f"resolution must be an integer >= 2, got {self.resolution}")

    @classmethod
    def square(cls, half_width: float, resolution: int) -> "GridSpec":
        return cls(-half_width, half_width, -half_width, half_width, resolution)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.resolution

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / self.resolution

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def centers(self):
        """1-D arrays of cell-centre coordinates along x and y."""
        n = self.resolution
        xs = self.x_min + (np.arange(n) + 0.5) * self.dx
        ys = self.y_min + (np.arange(n) + 0.5) * self.dy
        return xs, ys

    def mesh(self):
        xs, ys = self.centers()
        return np.meshgrid(xs, ys)  # shape (ny, nx), row index is y

    def cell_index(self, x, y):
        """Row/column of the cells containing points; -1 where outside the grid."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        col = np.floor((x - self.x_min) / self.dx).astype(np.int64)
        row = np.floor((y - self.y_min) / self.dy).astype(np.int64)
        inside = (col >= 0) & (col < self.resolution) & (row >= 0) & (row < self.resolution)
        return np.where(inside, row, -1), np.where(inside, col, -1)


@dataclass
class WorkspaceGrid:
    spec: GridSpec
    reachable: np.ndarray

    @property
    def cell_area(self) -> float:
        return self.spec.cell_area

    @property
    def area(self) -> float:
        return int(np.count_nonzero(self.reachable)) * self.cell_area


@dataclass
class ScalarField:
    spec: GridSpec
    values: np.ndarray

    def argmax_radius(self) -> float:
        xs, ys = self.spec.mesh()
        idx = np.nanargmax(self.values)
        return float(np.hypot(xs.flat[idx], ys.flat[idx]))


@dataclass(frozen=True)
class FiveBarGeometry:
    """Planar five-bar leg: two motors at (-d/2, 0) and (d/2, 0).

    Each motor swings a proximal link of length ``proximal``; the two distal
    links (length ``distal``) meet at the toe.  ``limits`` holds the
    ``(min, max)`` absolute angle of each motor, measured from +x.
    """

    hip_separation: float
    proximal: float
    distal: float
    limits: tuple = ((-math.pi, math.pi), (-math.pi, math.pi))

    def __post_init__(self):
        if not (self.proximal > 0 and self.distal > 0):
            raise ValueError("five-bar link lengths must be positive")
        if self.hip_separation < 0:
            raise ValueError("hip separation must be >= 0")
        lim = tuple(tuple(float(v) for v in pair) for pair in self.limits)
        if len(lim) != 2 or any(len(p) != 2 or not p[0] < p[1] for p in lim):
            raise ValueError(f"limits must be two (min, max) pairs with min < max, got {self.limits}")
        object.__setattr__(self, "limits", lim)


#: Illustrative coaxial baseline with matched total length.
DEFAULT_FIVEBAR = FiveBarGeometry(
    hip_separation=0.0,
    proximal=0.025,
    distal=0.033,
    limits=((-2.9, -1.9), (-1.25, -0.25)),
)


@dataclass(frozen=True)
class ComparisonReport:
    area_a: float
    area_b: float
    ratio: float
    b_contained_in_a: bool

    def to_dict(self) -> dict:
        return {
            "area_a": self.area_a,
            "area_b": self.area_b,
            "ratio": self.ratio,
            "b_contained_in_a": self.b_contained_in_a,
        }


def serial_workspace(geom: LegGeometry, spec: GridSpec) -> WorkspaceGrid:
    xs, ys = spec.mesh()
    r = np.hypot(xs, ys)
    reachable = (r >= geom.inner_radius) & (r <= geom.reach)
    return WorkspaceGrid(spec, reachable)


def fivebar_toe(fb: FiveBarGeometry, phi1, phi2):
    """Toe position for motor angles; NaN where the distal links cannot meet.

    The toe is the circle-circle intersection on the clockwise side of the
    elbow1 -> elbow2 chord, which is the lower one when elbow 1 is on the
    left.  Coincident elbows have no unique toe and yield NaN.
    """
    phi1 = np.asarray(phi1, dtype=float)
    phi2 = np.asarray(phi2, dtype=float)
    h = fb.hip_separation / 2.0
    e1x = -h + fb.proximal * np.cos(phi1)
    e1y = fb.proximal * np.sin(phi1)
    e2x = h + fb.proximal * np.cos(phi2)
    e2y = fb.proximal * np.sin(phi2)
    ux, uy = e2x - e1x, e2y - e1y
    c = np.hypot(ux, uy)
    with np.errstate(invalid="ignore", divide="ignore"):
        half = c / 2.0
        depth = np.sqrt(fb.distal**2 - half**2)
        ok = (c > 1e-12 * fb.proximal) & (half <= fb.distal)
        mx, my = (e1x + e2x) / 2.0, (e1y + e2y) / 2.0
        tx = mx + depth * uy / c
        ty = my - depth * ux / c
    return np.where(ok, tx, np.nan), np.where(ok, ty, np.nan)


def fivebar_workspace(fb: FiveBarGeometry, spec: GridSpec, samples_per_axis: int = 256) -> WorkspaceGrid:
    if samples_per_axis < 8:
        raise ValueError("samples_per_axis must be >= 8")
    if fb.proximal + fb.distal < fb.hip_separation / 2.0:
        raise DegenerateGeometry(
            f"proximal+distal={fb.proximal + fb.distal:.6g} < d/2={fb.hip_separation / 2:.6g}; "
            "the linkage cannot assemble"
        )
    (lo1, hi1), (lo2, hi2) = fb.limits
    p1 = np.linspace(lo1, hi1, samples_per_axis)
    p2 = np.linspace(lo2, hi2, samples_per_axis)
    reachable = np.zeros((spec.resolution, spec.resolution), dtype=bool)
    # row-by-row keeps memory flat; output does not depend on the order
    for a in p1:
        tx, ty = fivebar_toe(fb, a, p2)
        good = np.isfinite(tx)
        rows, cols = spec.cell_index(tx[good], ty[good])
        keep = rows >= 0
        reachable[rows[keep], cols[keep]] = True
    return WorkspaceGrid(spec, reachable)


def manipulability_map(geom: LegGeometry, spec: GridSpec, branch: Branch = Branch.ELBOW_PLUS) -> ScalarField:
    """Yoshikawa index at every reachable cell centre (NaN elsewhere)."""
    grid = serial_workspace(geom, spec)
    xs, ys = spec.mesh()
    values = np.full(xs.shape, np.nan)
    mask = grid.reachable
    _, q2, _ = legkin.inverse_kinematics_array(geom, xs[mask], ys[mask], branch)
    values[mask] = legkin.manipulability_array(geom, q2)
    return ScalarField(spec, values)


def configuration_manipulability(geom: LegGeometry, samples: int = 181, space: str = "joint"):
    """Manipulability over a uniform angle grid on [-pi, pi]^2.

    ``space="joint"`` samples (q1, q2); ``space="actuator"`` samples
    (theta1, theta2).  Returns ``(axis, values)`` with ``values[i, j]`` at
    second angle ``axis[i]``, first angle ``axis[j]``.  In Cartesian space
    both legs have the same field; in their own coordinates they differ.
    """
    axis = np.linspace(-math.pi, math.pi, samples)
    a1, a2 = np.meshgrid(axis, axis)
    q2 = a2 if space == "joint" else a2 - a1
    return axis, legkin.manipulability_array(geom, q2)


def projected_manipulability(geom: LegGeometry, spec: GridSpec, samples: int = 181,
                             space: str = "joint") -> tuple[ScalarField, np.ndarray]:
    """Push a uniform angle grid through FK and bin it on ``spec``.

    Returns the per-cell mean manipulability (NaN where no sample landed)
    and the per-cell sample count.  The mean matches the Cartesian map; the
    counts are where the two angle parametrisations differ.
    """
    if space not in ("joint", "actuator"):
        raise ValueError("space must be 'joint' or 'actuator'")
    axis = np.linspace(-math.pi, math.pi, samples)
    a1, a2 = np.meshgrid(axis, axis)
    q1, q2 = (a1, a2) if space == "joint" else (a1, a2 - a1)
    x, y = legkin.forward_kinematics_array(geom, q1, q2)
    w = legkin.manipulability_array(geom, q2)
    rows, cols = spec.cell_index(x.ravel(), y.ravel())
    inside = rows >= 0
    flat = rows[inside] * spec.resolution + cols[inside]
    size = spec.resolution * spec.resolution
    counts = np.bincount(flat, minlength=size)
    total = np.bincount(flat, weights=w.ravel()[inside], minlength=size)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(counts > 0, total / counts, np.nan)
    shape = (spec.resolution, spec.resolution)
    return ScalarField(spec, mean.reshape(shape)), counts.reshape(shape)


def compare_workspaces(a: WorkspaceGrid, b: WorkspaceGrid) -> ComparisonReport:
    if a.spec != b.spec:
        raise GridMismatch(f"grid specs differ: {a.spec} vs {b.spec}")
    area_a, area_b = a.area, b.area
    ratio = area_b / area_a if area_a > 0 else math.nan
    contained = not np.any(b.reachable & ~a.reachable)
    return ComparisonReport(area_a, area_b, ratio, bool(contained))


def _raster_values(data) -> tuple[GridSpec, np.ndarray]:
    if isinstance(data, WorkspaceGrid):
        return data.spec, data.reachable.astype(float)
    return data.spec, np.asarray(data.values, dtype=float)


def grid_to_csv(data: WorkspaceGrid | ScalarField) -> str:
    """``x,y,value`` rows in row-major order (y outer, x inner); NaN written as ``nan``."""
    spec, values = _raster_values(data)
    xs, ys = spec.mesh()
    out = io.StringIO()
    out.write("x,y,value\n")
    for x, y, v in zip(xs.ravel(), ys.ravel(), values.ravel()):
        out.write(f"{x:.9g},{y:.9g},{v:.9g}\n")
    return out.getvalue()


def grid_to_pgm(data: WorkspaceGrid | ScalarField) -> bytes:
    """Binary 8-bit PGM; first image row is the top (largest y).

    Values are scaled by the largest finite value onto [0, 255]; NaN -> 0.
    """
    spec, values = _raster_values(data)
    v = np.where(np.isfinite(values), values, 0.0)
    top = v.max() if v.size else 0.0
    scaled = np.zeros_like(v) if top <= 0 else np.clip(v / top, 0.0, 1.0) * 255.0
    pixels = np.rint(scaled).astype(np.uint8)[::-1]
    n = spec.resolution
    return f"P5\n{n} {n}\n255\n".encode("ascii") + pixels.tobytes()
