import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.interpolate import RectBivariateSpline

from surftrap.geometry import CrossSectionGeometry, Disc, Electrode, Rectangle, build_canonical
from surftrap.laplace import (DielectricMap, Grid, SolverError, array_from_csv, array_to_csv,
                              boundary_fractions, field_of, make_grid, rasterize, relax,
                              residual_check, solve_basis, solve_fixed, solve_rf, superpose)

volts = st.floats(-10, 10, allow_nan=False)


def plates(d=1e-4, gap=1.0, length=30.0, t=0.2):
    y = (gap + t) / 2 * d
    return CrossSectionGeometry([
        Electrode(Rectangle((0.0, y), length * d, t * d), "rf", name="top"),
        Electrode(Rectangle((0.0, -y), length * d, t * d), "control", 0, name="bottom"),
    ], d, "plates")


def test_enclosed_box_is_equipotential():
    fixed = np.zeros((41, 31))
    free = np.zeros_like(fixed, bool)
    free[1:-1, 1:-1] = True
    fixed[~free] = 1.0
    phi, r, _ = relax(fixed, free, tol=1e-12)
    assert r <= 1e-12
    assert np.abs(phi - 1.0).max() < 1e-9


def test_parallel_plate_field():
    g = plates()
    b = solve_rf(g, make_grid(g, resolution=10))
    E = field_of(b.entries[0].phi, b.grid, b.electrode_mask)
    i, j = b.grid.index(0.0, 0.0)
    assert -E.Ey[i, j] == pytest.approx(1.0 / g.d, rel=0.01)
    assert abs(E.Ex[i, j]) < 1e-3 / g.d


def test_dielectric_interface_continuity():
    g = plates()
    grid = make_grid(g, resolution=10)
    b = solve_rf(g, grid, eps=DielectricMap.substrate(grid, 0.0, 4.0))
    E = field_of(b.entries[0].phi, grid, b.electrode_mask)
    up, lo = grid.index(0.0, 0.25 * g.d), grid.index(0.0, -0.25 * g.d)
    # normal displacement is continuous across the interface
    assert E.Ey[up] == pytest.approx(4.0 * E.Ey[lo], rel=0.02)
    # the two layers share the 1 V drop
    assert -(E.Ey[up] + E.Ey[lo]) * g.d / 2 == pytest.approx(1.0, rel=0.02)


@settings(max_examples=25, deadline=None)
@given(st.lists(volts, min_size=5, max_size=5), st.lists(volts, min_size=5, max_size=5),
       st.floats(-3, 3), st.floats(-3, 3))
def test_superposition_linearity(five_wire_basis, v1, v2, a, b):
    p1 = superpose(five_wire_basis, dict(enumerate(v1)))
    p2 = superpose(five_wire_basis, dict(enumerate(v2)))
    mix = superpose(five_wire_basis, {k: a * x + b * y for k, (x, y) in enumerate(zip(v1, v2))})
    assert np.allclose(mix, a * p1 + b * p2, rtol=0, atol=1e-10 * (1 + np.abs(mix).max()))


@settings(max_examples=25, deadline=None)
@given(st.lists(volts, min_size=5, max_size=5))
def test_maximum_principle(five_wire_basis, v):
    phi = superpose(five_wire_basis, dict(enumerate(v)))
    lo, hi = min(min(v), 0.0), max(max(v), 0.0)
    slack = 1e-6 * (1 + hi - lo)
    assert phi.min() >= lo - slack
    assert phi.max() <= hi + slack


def test_superpose_requires_all_voltages(five_wire_basis):
    with pytest.raises(KeyError):
        superpose(five_wire_basis, {0: 1.0})
    assert not superpose(five_wire_basis, dict.fromkeys(range(5), 0.0)).any()


def test_superpose_by_name(five_wire_basis, five_wire):
    by_name = superpose(five_wire_basis, {n: 1.0 if n.startswith("rf") else 0.0
                                          for n in five_wire.names})
    by_index = superpose(five_wire_basis, {k: 1.0 if k in five_wire.rf_indices else 0.0
                                           for k in range(5)})
    assert np.array_equal(by_name, by_index)


def test_grouped_entries_need_common_voltage(five_wire):
    b = solve_rf(five_wire, make_grid(five_wire, resolution=20))
    with pytest.raises(ValueError):
        superpose(b, {1: 1.0, 3: 0.5})


def test_mirror_symmetry(five_wire_basis, five_wire):
    phi = superpose(five_wire_basis, {k: 1.0 if k in five_wire.rf_indices else 0.0
                                      for k in range(5)})
    assert five_wire_basis.grid.xs[0] == pytest.approx(-five_wire_basis.grid.xs[-1])
    assert np.abs(phi - phi[::-1]).max() < 1e-7


def test_residual_check_reports_convergence_and_locates_defects(five_wire_basis):
    reports = residual_check(five_wire_basis)
    assert all(r.max <= five_wire_basis.tol * 1.0001 for r in reports)
    assert all(r.rms <= r.max for r in reports)
    e = five_wire_basis.entries[0]
    bad = e.phi.copy()
    i, j = five_wire_basis.grid.index(0.0, 2 * five_wire_basis.geometry.d)
    bad[i, j] += 1e-3
    rep = residual_check(five_wire_basis, {e.members: bad})[0]
    assert abs(rep.argmax[0] - i) <= 1 and abs(rep.argmax[1] - j) <= 1
    assert rep.max > 1e-4


def test_relaxation_residual_decreases():
    fixed = np.zeros((61, 61))
    free = np.ones_like(fixed, bool)
    free[[0, -1], :] = free[:, [0, -1]] = False
    fixed[0, :] = 1.0
    hist = []
    relax(fixed, free, tol=1e-10, history=hist)
    r = np.array([h[1] for h in hist])
    assert r[-1] <= 1e-10
    # the residual falls steadily once per few checks even if not every check
    assert np.all(r[3:] < r[:-3])


def test_field_of_linear_ramp():
    grid = Grid(30, 20, 0.1, (0.0, 0.0))
    X, Y = grid.mesh()
    E = field_of(2.0 * X - 3.0 * Y, grid)
    assert np.allclose(E.Ex, -2.0) and np.allclose(E.Ey, 3.0)


def test_four_rod_field_is_quadrupolar(four_rod_rf):
    b = four_rod_rf
    d = b.geometry.d
    E = field_of(b.entries[0].phi, b.grid, b.electrode_mask)
    ex = RectBivariateSpline(b.grid.xs, b.grid.ys, E.Ex)
    ey = RectBivariateSpline(b.grid.xs, b.grid.ys, E.Ey)

    def mag(x, y):
        return float(np.hypot(ex(x, y)[0, 0], ey(x, y)[0, 0]))

    assert mag(0, 0) < 1e-3 * mag(0.5 * d, 0)
    assert mag(0.2 * d, 0) == pytest.approx(2 * mag(0.1 * d, 0), rel=0.01)
    assert mag(0.2 * d, 0) == pytest.approx(mag(0, 0.2 * d), rel=0.01)


def test_convergence_order_five_wire(five_wire):
    # RF field at the nominal trap center on three successive refinements
    d = five_wire.d
    vals = []
    for res in (20, 40, 80):
        b = solve_rf(five_wire, make_grid(five_wire, resolution=res))
        phi = RectBivariateSpline(b.grid.xs, b.grid.ys, b.entries[0].phi)
        vals.append(-phi(0.0, d, dy=1)[0, 0])
    order = np.log2(abs(vals[0] - vals[1]) / abs(vals[1] - vals[2]))
    assert order >= 1.7


def test_boundary_fit_beats_staircase_off_grid():
    d = 1.0
    g = CrossSectionGeometry([Electrode(Disc((0.31, 0.017), 1.0137), "rf", name="a"),
                              Electrode(Rectangle((0.0, -3.0123), 1.3, 0.4713), "control", 0,
                                        name="b")], d, "disc")
    out = {}
    for fit in (False, True):
        v = []
        for res in (10, 20, 40):
            b = solve_rf(g, make_grid(g, resolution=res), tol=1e-11, boundary_fit=fit)
            v.append(b.entries[0].phi[b.grid.index(3.0, 0.0)])
        out[fit] = np.log2(abs(v[0] - v[1]) / abs(v[1] - v[2]))
    assert out[True] >= 1.7
    assert out[True] > out[False]


def test_boundary_fractions_in_unit_interval():
    g = build_canonical("four_rod")
    grid = make_grid(g, resolution=10)
    f = boundary_fractions(g, grid, rasterize(g, grid))
    assert f.min() > 0 and f.max() == 1.0
    assert (f < 1).sum() > 0


def test_csv_round_trip(five_wire_basis):
    phi = five_wire_basis.entries[1].phi
    arr, grid, meta = array_from_csv(array_to_csv(phi, five_wire_basis.grid, {"what": "phi"}))
    assert np.array_equal(arr, phi)
    assert grid == five_wire_basis.grid and meta["what"] == "phi"


def test_grid_and_solver_validation(five_wire):
    with pytest.raises(ValueError):
        make_grid(five_wire, margin=4.0)
    with pytest.raises(SolverError):
        solve_rf(five_wire, make_grid(five_wire, resolution=10))  # 0.1 d electrodes
    with pytest.raises(ValueError):
        solve_basis(five_wire, make_grid(five_wire, resolution=20), tol=1e-2)


def test_grid_box_is_resolution_independent(five_wire):
    a, b = make_grid(five_wire, resolution=20), make_grid(five_wire, resolution=40)
    assert a.xs[0] == pytest.approx(b.xs[0]) and a.ys[-1] == pytest.approx(b.ys[-1])


def test_solve_fixed_matches_superposition(five_wire_basis, five_wire):
    v = {0: 1.5, 1: -2.0, 2: 0.25, 3: 3.0, 4: 0.0}
    sol = solve_fixed(five_wire, v, five_wire_basis.grid)
    assert np.abs(sol.phi - superpose(five_wire_basis, v)).max() < 1e-6
    assert np.array_equal(sol.electrode_mask, five_wire_basis.electrode_mask)
    with pytest.raises(ValueError):
        solve_fixed(five_wire, {0: 1.0}, five_wire_basis.grid)
