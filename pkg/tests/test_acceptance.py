"""Acceptance criteria, one test per criterion.

Each test prints a single ``ACCEPTANCE n: PASS|FAIL`` line with the measured
values, then asserts the stated targets at the stated tolerances.
"""
import math
import subprocess
import sys
import time
from pathlib import Path

import pytest

from surftrap import analytic as A
from surftrap import engineering as E
from surftrap import scaling as S
from surftrap.geometry import DriveConfig, StaticConfig, build_canonical
from surftrap.laplace import make_grid
from surftrap.pseudo import analyze, build_model, compare_to_reference, reference_baseline

SQ3 = math.sqrt(3)
TESTS = Path(__file__).parent


def near(value, target, *, rel=None, tol=None):
    if tol is None:
        tol = rel * abs(target)
    return abs(value - target) <= tol


@pytest.fixture
def report(capsys):
    def emit(n, checks, elapsed, limit, detail):
        ok = all(checks.values()) and (limit is None or elapsed < limit)
        failed = [k for k, v in checks.items() if not v]
        if limit is not None and elapsed >= limit:
            failed.append(f"runtime {elapsed:.1f}s >= {limit}s")
        line = f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s) {detail}"
        if failed:
            line += " | failed: " + ", ".join(failed)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return emit


def test_1_line_charge_exact_values(report):
    t = time.perf_counter()
    q, s = A.reference_quadrupole(), A.reference_four_wire_surface()
    checks = {
        "quadrupole curvature 32": near(q.curvature_at_min, 32, rel=1e-9),
        "four-wire curvature 8/3": near(s.curvature_at_min, 8 / 3, rel=1e-9),
        "curvature ratio 1/12": near(s.curvature_at_min / q.curvature_at_min, 1 / 12, rel=1e-9),
        "quadrupole max 3*sqrt3": near(q.upsilon_at_max, 3 * SQ3, rel=1e-9),
        "four-wire max 1/(7+4sqrt3)": near(s.upsilon_at_max, 1 / (7 + 4 * SQ3), rel=1e-9),
        "minima (0, +-sqrt3/2)": sorted(z.imag for z in s.minima) == pytest.approx([-SQ3 / 2, SQ3 / 2], rel=1e-9)
        and all(abs(z.real) < 1e-9 for z in s.minima),
        "frequency ratio 1/(2sqrt3)": near(s.frequency_ratio_vs_quadrupole, 1 / (2 * SQ3), rel=1e-9),
        "depth factor 3(12+7sqrt3)": near(s.depth_factor, 3 * (12 + 7 * SQ3), rel=1e-9),
    }
    for sys_ in (A.quadrupole_system(), A.four_wire_system()):
        minima, crit = A.exact_stationary_points(sys_)
        found = [z for z, _ in A.newton_stationary_search(sys_)]
        checks[f"{sys_.label} search recovers all points"] = all(
            min(abs(z - f) for f in found) < 1e-9 for z in list(minima) + list(crit))
    dt = time.perf_counter() - t
    report(1, checks, dt, 1.0,
           f"curv {q.curvature_at_min:.12g}/{s.curvature_at_min:.12g} "
           f"depth factor {s.depth_factor:.10g}")


def test_2_finite_conductor_fit(report):
    t = time.perf_counter()
    fit = A.finite_conductor_fit(wire_diameter=0.2)
    r = fit.result
    mins = sorted(z.imag for z in r.minima)
    maxs = sorted(z.imag for z in r.maxima if abs(z.real) < 1e-9)
    checks = {
        "charge ratio 1.35+-0.02": near(fit.charge_ratio, 1.35, tol=0.02),
        "axes (0,+-1.18)+-0.02": len(mins) == 2 and near(mins[0], -1.18, tol=0.02)
        and near(mins[1], 1.18, tol=0.02),
        "maxima (0,+-1.96)+-0.03": len(maxs) >= 2 and near(maxs[0], -1.96, tol=0.03)
        and near(maxs[-1], 1.96, tol=0.03),
        "frequency factor 0.16+-0.01": near(r.frequency_ratio_vs_quadrupole, 0.16, tol=0.01),
        "depth factor 200+-10": near(r.depth_factor, 200, tol=10),
    }
    dt = time.perf_counter() - t
    report(2, checks, dt, 10.0,
           f"ratio {fit.charge_ratio:.4f} axes +-{mins[-1]:.4f} maxima {maxs} "
           f"freq {r.frequency_ratio_vs_quadrupole:.4f} depth {r.depth_factor:.1f}")


def test_3_solver_vs_oracle(report):
    t = time.perf_counter()
    checks, parts = {}, []
    for sys_ in (A.quadrupole_system(), A.four_wire_system()):
        r = A.solve_realization(sys_, resolution=40)
        o = r.oracle
        cr = r.curvature_at_min / o.curvature_at_min
        dr = r.upsilon_at_max / o.upsilon_at_max
        checks[f"{sys_.label} minimum within 0.02"] = r.minimum_error < 0.02
        checks[f"{sys_.label} curvature within 5%"] = near(cr, 1, tol=0.05)
        checks[f"{sys_.label} depth within 5%"] = near(dr, 1, tol=0.05)
        parts.append(f"{sys_.label}: dz {r.minimum_error:.4f} curv {cr:.4f} depth {dr:.4f}")
    dt = time.perf_counter() - t
    report(3, checks, dt, 120.0, "; ".join(parts))


@pytest.fixture(scope="module")
def surface_table():
    """Dimensionless strength and depth of the shipped geometries."""
    t = time.perf_counter()
    base = reference_baseline()
    rows = {}
    for kind, kw in [("three_layer", {"gamma": 1.8}), ("four_wire", {}), ("five_wire", {}),
                     ("five_wire_in_plane", {}), ("four_rod", {})]:
        tc = analyze(build_model(build_canonical(kind, **kw), DriveConfig(1.0, 1.0)))
        rows[kind] = compare_to_reference(tc, base, check_metadata=False)
    return rows, time.perf_counter() - t


def test_4_normalized_table(report, surface_table):
    rows, dt = surface_table
    targets = {"three_layer": (0.52, 0.078), "four_wire": (0.34, 0.017),
               "five_wire": (0.30, 0.010), "five_wire_in_plane": (0.32, 0.051)}
    checks, parts = {}, []
    for kind, (f0, u0) in targets.items():
        f, u = rows[kind]
        checks[f"{kind} f {f:.3f} vs {f0}"] = near(f, f0, rel=0.15)
        checks[f"{kind} u {u:.4f} vs {u0}"] = near(u, u0, rel=0.15)
        parts.append(f"{kind} ({f:.3f}, {u:.4f})")
    report(4, checks, dt, 300.0, "; ".join(parts))


def test_5_aspect_exponents(report):
    t = time.perf_counter()
    fit = E.aspect_ratio_exponents()
    dt = time.perf_counter() - t
    checks = {
        "depth exponent -2.01+-0.15": near(fit.depth_exponent, -2.01, tol=0.15),
        "frequency exponent -0.93+-0.10": near(fit.frequency_exponent, -0.93, tol=0.10),
        "depth rms < 0.05": fit.depth_rms < 0.05,
        "frequency rms < 0.05": fit.frequency_rms < 0.05,
    }
    report(5, checks, dt, 600.0,
           f"depth {fit.depth_exponent:.3f} (rms {fit.depth_rms:.3f}) "
           f"frequency {fit.frequency_exponent:.3f} (rms {fit.frequency_rms:.3f})")


def _axes(kind, **kw):
    g = build_canonical(kind, **kw)
    static = StaticConfig(dict.fromkeys(g.control_indices, 1.0))
    drive = DriveConfig(100.0, 2 * math.pi * 100e6)
    tc = analyze(build_model(g, drive, static=static, grid=make_grid(g, resolution=40)))
    return sorted((a + 90) % 180 - 90 for a in tc.principal_axes)


def test_6_principal_axes(report):
    t = time.perf_counter()
    sym = sorted(abs(a) for a in _axes("five_wire"))
    asym = min(abs(a) for a in _axes("five_wire", rf_width_left=1.5, rf_width_right=0.5))
    four = min(abs(a) for a in _axes("four_wire"))
    dt = time.perf_counter() - t
    checks = {
        "symmetric five-wire 0/90+-1": near(sym[0], 0, tol=1) and near(sym[1], 90, tol=1),
        "asymmetric five-wire 30+-3": near(asym, 30, tol=3),
        "four-wire 45+-3": near(four, 45, tol=3),
    }
    report(6, checks, dt, None,
           f"symmetric {sym[0]:.2f}/{sym[1]:.2f} asymmetric {asym:.2f} four-wire {four:.2f} deg")


def test_7_surface_ranges(report, surface_table):
    rows, dt = surface_table
    f_rod, u_rod = rows["four_rod"]
    checks, parts = {}, []
    for kind in ("four_wire", "five_wire", "five_wire_in_plane"):
        f, u = rows[kind]
        ratio, factor = f / f_rod, u_rod / u
        checks[f"{kind} frequency ratio {ratio:.3f} in [1/6,1/3]"] = 1 / 6 <= ratio <= 1 / 3
        checks[f"{kind} depth factor {factor:.0f} in [30,200]"] = 30 <= factor <= 200
        parts.append(f"{kind} ({ratio:.3f}, {factor:.0f})")
    report(7, checks, dt, None, "; ".join(parts))


def test_8_scaling_limits(report):
    t = time.perf_counter()
    be = S.load_preset("be-quadrupole")
    hi = S.load_preset("be-quadrupole-breakdown")
    r1 = S.min_radius_for_ratio(be, 1.0)
    f17 = S.evaluate(be, 1.7e-9).secular_hz
    r100 = S.min_radius_for_ratio(be, 100.0)
    rhi = S.min_radius_for_ratio(hi, 1.0)
    drive = S.drive_to_secular_ratio(be.q)
    dt = time.perf_counter() - t
    checks = {
        "ratio 1 at 1.7nm+-2%": near(r1, 1.7e-9, rel=0.02),
        "secular 2.9GHz+-2%": near(f17, 2.9e9, rel=0.02),
        "min radius(100) 37nm+-2%": near(r100, 37e-9, rel=0.02),
        "E0=1e9 radius 0.2nm+-10%": near(rhi, 0.2e-9, rel=0.10),
        "drive/secular 2sqrt2/0.21": near(drive, 2 * math.sqrt(2) / 0.21, rel=1e-9),
    }
    report(8, checks, dt, 1.0,
           f"R(1) {r1 * 1e9:.3f} nm, f(1.7nm) {f17 / 1e9:.3f} GHz, R(100) {r100 * 1e9:.2f} nm, "
           f"R(1e9 V/m) {rhi * 1e9:.3f} nm")


def test_9_engineering(report):
    t = time.perf_counter()
    C, w, V0, R, tand = 3e-12, 2 * math.pi * 100e6, 100.0, 1.0, 4e-4
    p = E.dissipated_power(E.DissipationInput(C, w, V0, R, tand))
    I = V0 * w * C / math.sqrt(2)
    fc = E.rc_rolloff(1e3, 1e-9)
    sens = E.dielectric_sensitivity(build_canonical("five_wire", gap=0.25), 10.0)
    dt = time.perf_counter() - t
    checks = {
        "P_total in [15,25] mW": 15e-3 <= p.P_total <= 25e-3,
        "components match formula": near(p.I_rms, I, rel=1e-12)
        and near(p.P_lead, I ** 2 * R, rel=1e-12)
        and near(p.P_dielectric, I ** 2 * tand / (w * C), rel=1e-12)
        and near(p.P_total, p.P_lead + p.P_dielectric, rel=1e-12),
        "rolloff 159.15 kHz+-0.01%": near(fc, 159.15e3, rel=1e-4),
        "dielectric sensitivity in [0.3%,3%]": 0.003 <= sens.max_relative_difference <= 0.03,
    }
    report(9, checks, dt, 120.0,
           f"P {p.P_total * 1e3:.2f} mW, rolloff {fc / 1e3:.3f} kHz, "
           f"sensitivity {sens.max_relative_difference * 100:.2f}%")


PROPERTY_TESTS = [
    "test_laplace.py::test_maximum_principle",
    "test_laplace.py::test_superposition_linearity",
    "test_laplace.py::test_convergence_order_five_wire",
    "test_pseudo.py::test_micromotion_ratio_is_half_q",
    "test_pseudo.py::test_trajectory_secular_frequency_matches_hessian",
    "test_pseudo.py::test_depth_scales_as_drive_amplitude_squared",
]


def test_10_property_suites(report):
    t = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                           *[str(TESTS / k) for k in PROPERTY_TESTS]],
                          capture_output=True, text=True, cwd=TESTS.parent)
    dt = time.perf_counter() - t
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    report(10, {"property tests pass": proc.returncode == 0}, dt, 600.0, summary)
