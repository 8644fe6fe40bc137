import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from surftrap import scaling as S
from surftrap.geometry import Species


@pytest.fixture
def be():
    return S.load_preset("be-quadrupole")


def test_presets(be):
    assert set(S.preset_names()) >= {"be-quadrupole", "be-quadrupole-breakdown"}
    assert be.q == 0.21 and be.beta == 0.34 and be.E0 == 1e6
    assert be.species.mass == pytest.approx(9 * 1.66053906660e-27, rel=1e-9)


def test_unknown_preset():
    with pytest.raises(S.ScalingError):
        S.load_preset("nope")


@pytest.mark.parametrize("kw", [dict(q=0.0), dict(q=0.95), dict(E0=-1.0), dict(beta=1.5)])
def test_scenario_invariants(kw):
    base = dict(species=Species.from_amu(9), q=0.21, E0=1e6, beta=0.34) | kw
    with pytest.raises(S.ScalingError):
        S.ScalingScenario(**base)


def test_point_invariants(be):
    p = S.evaluate(be, 37e-9)
    assert p.V0 == pytest.approx(be.E0 * 37e-9, rel=1e-15)
    assert p.omega_drive / p.omega_secular == pytest.approx(2 * math.sqrt(2) / 0.21, rel=1e-12)
    assert S.q_from_point(be, p) == pytest.approx(0.21, rel=1e-12)


def test_ratio_scales_as_r_three_halves(be):
    assert S.evaluate(be, 4e-9).quantum_ratio / S.evaluate(be, 1e-9).quantum_ratio == pytest.approx(8, rel=1e-12)


def test_secular_frequency_at_17nm(be):
    assert S.evaluate(be, 1.7e-9).secular_hz == pytest.approx(2.9e9, rel=0.02)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 10))
def test_min_radius_inverse(logt):
    be = S.load_preset("be-quadrupole")
    target = 10 ** logt
    R = S.min_radius_for_ratio(be, target)
    assert S.evaluate(be, R).quantum_ratio == pytest.approx(target, rel=1e-9)


def test_min_radius_requires_target_at_least_one(be):
    with pytest.raises(S.ScalingError):
        S.min_radius_for_ratio(be, 0.5)


def test_scan_slopes(be):
    Rs = np.geomspace(1e-9, 1e-5, 41)
    pts = S.scan(be, Rs)
    assert S.loglog_slope(Rs, [p.quantum_ratio for p in pts]) == pytest.approx(1.5, abs=1e-6)
    assert S.loglog_slope(Rs, [p.omega_secular for p in pts]) == pytest.approx(-0.5, abs=1e-9)
    assert S.loglog_slope(Rs, [p.omega_drive for p in pts]) == pytest.approx(-0.5, abs=1e-9)


def test_scan_csv(be):
    pts = S.scan(be, np.geomspace(1e-9, 1e-6, 5), [1e6, 1e9])
    lines = S.scan_to_csv(pts).strip().splitlines()
    assert len(lines) == 1 + 10
    head = lines[0].split(",")
    for row in lines[1:]:
        vals = dict(zip(head, row.split(",")))
        assert vals["depth_in_hbar_omega"] == vals["quantum_ratio"]


def test_scan_rejects_unsorted(be):
    with pytest.raises(S.ScalingError):
        S.scan(be, [2e-9, 1e-9])


@pytest.mark.parametrize("d, skin, patch, expected", [
    (1e-6, 1e-4, None, -3),
    (1e-2, 1e-4, None, -2),
    (1e-4, 1e-4, 1e-5, -4),
])
def test_heating_exponent(d, skin, patch, expected):
    assert S.heating_exponent(d, skin, patch).exponent == expected


def test_heating_transitional():
    r = S.heating_exponent(1e-4, 2e-4)
    assert r.exponent is None and r.bounds == (-3, -2) and r.regime == "transitional"
