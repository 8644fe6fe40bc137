import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from surftrap.geometry import BERYLLIUM_9, DriveConfig, StaticConfig, build_canonical
from surftrap.laplace import field_of, make_grid
from surftrap.pseudo import (ParticleEscaped, TrapError, analyze, build_model, characterize,
                             compare_to_reference, micromotion_ratio, motion_spectrum,
                             pseudopotential_field, reference_baseline, stationary_points,
                             trajectory_for_model)


def rebuilt(model, **drive):
    return build_model(model.geometry, dataclasses.replace(model.drive, **drive),
                       basis=model.basis)


def test_pseudopotential_non_negative(four_rod_model):
    assert (four_rod_model.pseudo.U >= 0).all()


@settings(max_examples=10, deadline=None)
@given(st.floats(0.2, 5.0))
def test_pseudopotential_scales_as_inverse_drive_squared(four_rod_model, k):
    fm = field_of(four_rod_model.rf_potential, four_rod_model.basis.grid,
                  four_rod_model.basis.electrode_mask)
    a = pseudopotential_field(fm, BERYLLIUM_9, 1e8)
    b = pseudopotential_field(fm, BERYLLIUM_9, 1e8 * k)
    assert np.allclose(b.U * k * k, a.U, rtol=1e-12, atol=0)


def test_four_rod_is_isotropic(four_rod_model):
    tc = analyze(four_rod_model)
    w1, w2 = tc.secular_frequencies
    assert w2 == pytest.approx(w1, rel=0.01)
    assert np.hypot(*tc.r_min) < 0.01 * four_rod_model.geometry.d
    assert tc.q_params[0] == pytest.approx(0.2, rel=1e-6)
    assert tc.q_params[1] == pytest.approx(-0.2, rel=0.02)
    assert tc.escape_kind == "saddle"


def test_q_from_rf_curvature(four_rod_model):
    tc = analyze(four_rod_model)
    w_rf = math.sqrt(max(np.linalg.eigvalsh(tc.rf_hessian)) / BERYLLIUM_9.mass)
    assert tc.q_params[0] == pytest.approx(2 * math.sqrt(2) * w_rf / four_rod_model.drive.omega,
                                           rel=1e-12)


def test_depth_scales_as_drive_amplitude_squared(four_rod_model):
    a = analyze(four_rod_model)
    b = analyze(rebuilt(four_rod_model, V0=2 * four_rod_model.drive.V0))
    assert b.depth == pytest.approx(4 * a.depth, rel=1e-9)
    assert b.secular_frequencies[0] == pytest.approx(2 * a.secular_frequencies[0], rel=1e-9)
    assert b.strength_dimless == pytest.approx(a.strength_dimless, rel=1e-9)
    assert b.depth_dimless == pytest.approx(a.depth_dimless, rel=1e-9)


def test_compare_to_reference_self_and_metadata(four_rod_model):
    tc = analyze(four_rod_model)
    assert compare_to_reference(tc, tc) == (1.0, 1.0)
    ref = reference_baseline(drive=DriveConfig(1.0, 1.0))
    with pytest.raises(ValueError):
        compare_to_reference(tc, ref)
    f, u = compare_to_reference(tc, ref, check_metadata=False)
    assert f > 0 and u > 0


def test_static_offset_shifts_minimum():
    g = build_canonical("five_wire")
    grid = make_grid(g, resolution=20)
    drive = DriveConfig(100.0, 2 * math.pi * 100e6)
    base = analyze(build_model(g, drive, grid=grid))
    pushed = analyze(build_model(g, drive, grid=grid, static=StaticConfig({1: 0.05})),
                     seed=base.r_min)
    # positive center electrode pushes the ion up
    assert pushed.r_min[1] > base.r_min[1]


def test_stationary_point_census_five_wire():
    g = build_canonical("five_wire")
    m = build_model(g, DriveConfig(1.0, 1.0), grid=make_grid(g, resolution=20))
    pts = stationary_points(m.pseudo.U, m.basis.grid, m.pseudo.free,
                            region=(-1.5 * g.d, 1.5 * g.d, 0.3 * g.d, 4 * g.d))
    kinds = sorted(p["type"] for p in pts)
    assert kinds.count("min") == 1
    assert kinds.count("saddle") == 1
    mn = next(p for p in pts if p["type"] == "min")
    sd = next(p for p in pts if p["type"] == "saddle")
    assert sd["y"] > mn["y"]


def test_no_trap_raises():
    g = build_canonical("five_wire")
    m = build_model(g, DriveConfig(1.0, 1.0), grid=make_grid(g, resolution=20))
    with pytest.raises(TrapError):
        characterize(dataclasses.replace(m.pseudo, U=np.zeros_like(m.pseudo.U)),
                     geometry=g, drive=m.drive)


# --------------------------------------------------------------------------
# trajectories


def periods(model, n):
    return n * 2 * math.pi / model.drive.omega


def test_particle_at_minimum_stays(four_rod_model):
    tc = analyze(four_rod_model)
    tr = trajectory_for_model(four_rod_model, (*tc.r_min, 0.0, 0.0), periods(four_rod_model, 200))
    d = four_rod_model.geometry.d
    assert np.hypot(tr.x - tc.r_min[0], tr.y - tc.r_min[1]).max() < 1e-3 * d


@pytest.fixture(scope="module")
def displaced(four_rod_model):
    tc = analyze(four_rod_model)
    d = four_rod_model.geometry.d
    start = (tc.r_min[0] + 0.02 * d, tc.r_min[1], 0.0, 0.0)
    return tc, trajectory_for_model(four_rod_model, start, periods(four_rod_model, 400),
                                    steps_per_period=100)


def test_trajectory_secular_frequency_matches_hessian(displaced):
    tc, tr = displaced
    sp = motion_spectrum(tr, "x")
    expect = tc.secular_frequencies
    assert min(abs(sp.secular_omega - w) / w for w in expect) <= 0.02


def test_micromotion_ratio_is_half_q(displaced):
    tc, tr = displaced
    assert micromotion_ratio(tr, "x") == pytest.approx(abs(tc.q_params[0]) / 2, rel=0.10)


def test_secular_energy_is_bounded(displaced, four_rod_model):
    tc, tr = displaced
    d = four_rod_model.geometry.d
    # the secular amplitude neither grows nor decays
    n = len(tr.x) // 4
    first, last = np.ptp(tr.x[:n]), np.ptp(tr.x[-n:])
    assert last == pytest.approx(first, rel=0.05)
    assert np.abs(tr.x - tc.r_min[0]).max() < 0.03 * d


def test_escape_is_reported(four_rod_model):
    d = four_rod_model.geometry.d
    hot = (0.0, 0.0, 0.0, 2e5)
    with pytest.raises(ParticleEscaped) as err:
        trajectory_for_model(four_rod_model, hot, periods(four_rod_model, 200))
    assert err.value.trajectory.escape_time is not None
    assert d > 0


# --------------------------------------------------------------------------
# principal axes


def _axes(kind, v_ctl=1.0, res=20, **kw):
    # static potential between the control electrodes and the RF rails
    g = build_canonical(kind, **kw)
    static = StaticConfig(dict.fromkeys(g.control_indices, v_ctl))
    drive = DriveConfig(100.0, 2 * math.pi * 100e6)
    return analyze(build_model(g, drive, static=static, grid=make_grid(g, resolution=res)))


def _angle_mod(a):
    return (a + 90) % 180 - 90


def _tilt(tc):
    return min(abs(_angle_mod(a)) for a in tc.principal_axes)


@pytest.mark.parametrize("v_ctl", [0.0, 0.5, 2.0])
def test_symmetric_five_wire_axes(v_ctl):
    tc = _axes("five_wire", v_ctl)
    got = sorted(abs(_angle_mod(a)) for a in tc.principal_axes)
    assert got[0] == pytest.approx(0, abs=1) and got[1] == pytest.approx(90, abs=1)


def test_asymmetric_rf_rails_tilt_axes():
    tilt = _tilt(_axes("five_wire", rf_width_left=1.5, rf_width_right=0.5))
    assert 10 < tilt < 35
    mirrored = _tilt(_axes("five_wire", rf_width_left=0.5, rf_width_right=1.5))
    assert mirrored == pytest.approx(tilt, abs=0.5)


def test_four_wire_axes_are_tilted():
    assert _tilt(_axes("four_wire")) > 10


def test_axes_orthogonal():
    tc = _axes("four_wire")
    a, b = tc.principal_axes
    assert abs(_angle_mod(a - b)) == pytest.approx(90, abs=1e-6)
