import math

import numpy as np
import pytest

from miniq import legkin, workspace
from miniq.errors import DegenerateGeometry, GridMismatch
from miniq.legkin import Branch, LegGeometry
from miniq.workspace import DEFAULT_FIVEBAR, FiveBarGeometry, GridSpec


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(1, 0, 0, 1, 10)
    with pytest.raises(ValueError):
        GridSpec(0, 1, 0, 1, 1)
    spec = GridSpec(0, 2, 0, 1, 4)
    assert spec.cell_area == pytest.approx(0.5 * 0.25)


def test_cell_index_round_trips_centres():
    spec = GridSpec(-1, 3, -2, 2, 17)
    xs, ys = spec.mesh()
    rows, cols = spec.cell_index(xs, ys)
    assert np.array_equal(rows, np.repeat(np.arange(17)[:, None], 17, axis=1))
    assert np.array_equal(cols, np.repeat(np.arange(17)[None, :], 17, axis=0))
    assert spec.cell_index([5.0], [0.0])[0][0] == -1


def test_serial_disk_area(unit):
    grid = workspace.serial_workspace(unit, GridSpec.square(2.2, 801))
    assert grid.area == pytest.approx(4 * math.pi, rel=0.01)


def test_serial_annulus_area():
    grid = workspace.serial_workspace(LegGeometry(1.5, 0.5), GridSpec.square(2.2, 801))
    assert grid.area == pytest.approx(math.pi * (4 - 1), rel=0.01)


def test_origin_cell_reachable_iff_equal_links():
    spec = GridSpec.square(2.2, 801)  # odd resolution puts a cell centre on the origin
    centre = spec.resolution // 2
    assert workspace.serial_workspace(LegGeometry(1, 1), spec).reachable[centre, centre]
    assert not workspace.serial_workspace(LegGeometry(1.2, 1), spec).reachable[centre, centre]


@pytest.mark.parametrize("res", [200, 401, 801])
def test_serial_area_convergence(res):
    geom = LegGeometry(1.5, 0.5)
    grid = workspace.serial_workspace(geom, GridSpec.square(2.2, res))
    exact = math.pi * (geom.reach**2 - geom.inner_radius**2)
    assert abs(grid.area - exact) / exact <= 2.0 / res


def test_fivebar_toe_closes_the_loop():
    fb = FiveBarGeometry(0.02, 0.03, 0.05)
    phi1, phi2 = np.meshgrid(np.linspace(-3, 0, 40), np.linspace(-3, 0, 40))
    tx, ty = workspace.fivebar_toe(fb, phi1, phi2)
    ok = np.isfinite(tx)
    e1 = (-0.01 + 0.03 * np.cos(phi1), 0.03 * np.sin(phi1))
    e2 = (0.01 + 0.03 * np.cos(phi2), 0.03 * np.sin(phi2))
    assert np.allclose(np.hypot(tx - e1[0], ty - e1[1])[ok], 0.05)
    assert np.allclose(np.hypot(tx - e2[0], ty - e2[1])[ok], 0.05)


def test_fivebar_toe_lower_branch_for_symmetric_pose():
    fb = FiveBarGeometry(0.02, 0.03, 0.05)
    tx, ty = workspace.fivebar_toe(fb, -2.0, -math.pi + 2.0)
    assert tx == pytest.approx(0.0, abs=1e-15)
    assert ty < 0


def test_fivebar_coaxial_full_range_is_disk():
    grid = workspace.fivebar_workspace(FiveBarGeometry(0.0, 1.0, 1.0), GridSpec.square(2.2, 201), 512)
    assert grid.area == pytest.approx(4 * math.pi, rel=0.03)


def test_fivebar_tight_limits_smaller_than_serial(unit):
    fb = FiveBarGeometry(0.0, 1.0, 1.0, ((-2.3, -1.7), (-1.4, -0.8)))
    spec = GridSpec.square(2.2, 201)
    serial = workspace.serial_workspace(unit, spec)
    five = workspace.fivebar_workspace(fb, spec, 128)
    rep = workspace.compare_workspaces(serial, five)
    assert 0 < rep.ratio < 1
    assert rep.b_contained_in_a


def test_fivebar_no_intersection_gives_empty_grid():
    # elbows pinned 1.6 apart, further than two distal links can span
    fb = FiveBarGeometry(1.0, 0.3, 0.3, ((math.pi - 0.1, math.pi), (-0.1, 0.0)))
    grid = workspace.fivebar_workspace(fb, GridSpec.square(1.0, 50), 16)
    assert grid.area == 0.0


def test_fivebar_degenerate_geometry():
    with pytest.raises(DegenerateGeometry):
        workspace.fivebar_workspace(FiveBarGeometry(1.0, 0.1, 0.2), GridSpec.square(1.0, 10), 8)


def test_fivebar_rejects_few_samples():
    with pytest.raises(ValueError):
        workspace.fivebar_workspace(DEFAULT_FIVEBAR, GridSpec.square(0.06, 10), 4)


def test_fivebar_monotone_in_limits():
    spec = GridSpec.square(0.064, 121)
    (a0, a1), (b0, b1) = DEFAULT_FIVEBAR.limits
    n = 64
    step1, step2 = (a1 - a0) / (n - 1), (b1 - b0) / (n - 1)
    small = workspace.fivebar_workspace(DEFAULT_FIVEBAR, spec, n)
    # widen by whole lattice steps so the original samples are kept
    m = 10
    wider = FiveBarGeometry(0.0, DEFAULT_FIVEBAR.proximal, DEFAULT_FIVEBAR.distal,
                            ((a0 - m * step1, a1 + m * step1), (b0 - m * step2, b1 + m * step2)))
    grid = workspace.fivebar_workspace(wider, spec, n + 2 * m)
    assert not np.any(small.reachable & ~grid.reachable)
    assert grid.area > small.area


def test_manipulability_map_peak_ring(unit):
    spec = GridSpec.square(2.2, 801)
    field = workspace.manipulability_map(unit, spec)
    assert abs(field.argmax_radius() - math.sqrt(2)) <= spec.dx
    assert np.nanmax(field.values) == pytest.approx(1.0, abs=1e-9)


def test_manipulability_map_nan_outside_and_small_at_rim(unit):
    spec = GridSpec.square(2.2, 201)
    field = workspace.manipulability_map(unit, spec)
    xs, ys = spec.mesh()
    r = np.hypot(xs, ys)
    assert np.all(np.isnan(field.values[r > 2.0]))
    rim = (r > 1.97) & (r <= 2.0)
    assert np.nanmax(field.values[rim]) < 0.35
    assert np.all(field.values[r <= 2.0] >= 0)


def test_manipulability_map_radial_and_branch_independent(default_geom):
    spec = GridSpec.square(0.064, 301)
    plus = workspace.manipulability_map(default_geom, spec, Branch.ELBOW_PLUS)
    minus = workspace.manipulability_map(default_geom, spec, Branch.ELBOW_MINUS)
    both = np.isfinite(plus.values)
    assert np.array_equal(both, np.isfinite(minus.values))
    assert np.max(np.abs(plus.values[both] - minus.values[both])) <= 1e-12
    # 8-fold symmetric grid: the same radius recurs under transposes and flips
    v = plus.values
    for other in (v.T, v[::-1], v[:, ::-1]):
        assert np.nanmax(np.abs(v - other)) <= 1e-9


def test_manipulability_map_matches_det_route(default_geom):
    spec = GridSpec.square(0.064, 41)
    field = workspace.manipulability_map(default_geom, spec)
    xs, ys = spec.mesh()
    for i, j in [(20, 5), (3, 20), (30, 31), (10, 12)]:
        if np.isnan(field.values[i, j]):
            continue
        sol = legkin.inverse_kinematics(default_geom, (xs[i, j], ys[i, j]))
        w = legkin.yoshikawa(legkin.jacobians(default_geom, sol.joints).j_theta)
        assert field.values[i, j] == pytest.approx(w, abs=1e-15)


def test_configuration_fields_differ_in_coordinates_only(default_geom):
    axis, joint = workspace.configuration_manipulability(default_geom, 91, "joint")
    _, act = workspace.configuration_manipulability(default_geom, 91, "actuator")
    assert joint.max() == pytest.approx(act.max(), rel=1e-3)
    assert not np.allclose(joint, act)
    # joint-space map depends on q2 only: rows are constant
    assert np.allclose(joint, joint[:, :1])


def test_compare_identical_and_disjoint(unit):
    spec = GridSpec.square(2.2, 101)
    a = workspace.serial_workspace(unit, spec)
    rep = workspace.compare_workspaces(a, a)
    assert rep.ratio == 1.0 and rep.b_contained_in_a
    right = workspace.WorkspaceGrid(spec, np.zeros_like(a.reachable))
    right.reachable[:, -3:] = True  # outside the disk
    left = workspace.WorkspaceGrid(spec, np.zeros_like(a.reachable))
    left.reachable[:, :3] = True
    assert not workspace.compare_workspaces(left, right).b_contained_in_a


def test_compare_grid_mismatch(unit):
    a = workspace.serial_workspace(unit, GridSpec.square(2.2, 101))
    b = workspace.serial_workspace(unit, GridSpec.square(2.2, 103))
    with pytest.raises(GridMismatch):
        workspace.compare_workspaces(a, b)


def test_default_fivebar_contained_in_serial(default_geom):
    spec = GridSpec.square(0.064, 201)
    rep = workspace.compare_workspaces(
        workspace.serial_workspace(default_geom, spec),
        workspace.fivebar_workspace(DEFAULT_FIVEBAR, spec, 256),
    )
    assert rep.b_contained_in_a
    assert rep.ratio < 1


def test_grid_csv_export(unit):
    spec = GridSpec.square(2.2, 5)
    field = workspace.manipulability_map(unit, spec)
    lines = workspace.grid_to_csv(field).splitlines()
    assert lines[0] == "x,y,value"
    assert len(lines) == 1 + 25
    x, y, v = lines[1].split(",")
    assert float(x) == pytest.approx(spec.x_min + spec.dx / 2)
    assert float(y) == pytest.approx(spec.y_min + spec.dy / 2)
    assert v == "nan"


def test_grid_pgm_export(unit):
    spec = GridSpec.square(2.2, 11)
    field = workspace.manipulability_map(unit, spec)
    data = workspace.grid_to_pgm(field)
    header, pixels = data[:len(b"P5\n11 11\n255\n")], data[len(b"P5\n11 11\n255\n"):]
    assert header == b"P5\n11 11\n255\n"
    img = np.frombuffer(pixels, dtype=np.uint8).reshape(11, 11)
    assert img.max() == 255
    assert np.all(img[np.isnan(field.values[::-1])] == 0)
    peak = np.unravel_index(np.nanargmax(field.values[::-1]), img.shape)
    assert img[peak] == 255
    grid = workspace.serial_workspace(unit, spec)
    img2 = np.frombuffer(workspace.grid_to_pgm(grid)[len(header):], dtype=np.uint8).reshape(11, 11)
    assert set(np.unique(img2)) <= {0, 255}


def test_projected_fields_share_values_but_not_density(unit):
    spec = GridSpec.square(2.2, 41)
    joint, n_joint = workspace.projected_manipulability(unit, spec, 301, "joint")
    act, n_act = workspace.projected_manipulability(unit, spec, 301, "actuator")
    assert n_joint.sum() == n_act.sum() == 301 * 301
    assert not np.array_equal(n_joint, n_act)
    ref = workspace.manipulability_map(unit, spec).values
    xs, ys = spec.mesh()
    inner = (np.hypot(xs, ys) < 1.7) & (n_joint > 0) & (n_act > 0)
    # cell means stay near the cell-centre value; w varies little across a cell here
    assert np.max(np.abs(joint.values[inner] - ref[inner])) < 0.15
    assert np.max(np.abs(act.values[inner] - ref[inner])) < 0.15
    with pytest.raises(ValueError):
        workspace.projected_manipulability(unit, spec, 11, "cartesian")
