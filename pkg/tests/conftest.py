import pytest

from surftrap.geometry import build_canonical
from surftrap.laplace import make_grid, solve_basis, solve_rf


@pytest.fixture(scope="session")
def five_wire():
    return build_canonical("five_wire")


@pytest.fixture(scope="session")
def five_wire_basis(five_wire):
    """Every electrode separately, coarse grid."""
    return solve_basis(five_wire, make_grid(five_wire, resolution=20))


@pytest.fixture(scope="session")
def four_rod_rf():
    g = build_canonical("four_rod")
    return solve_rf(g, make_grid(g, resolution=20))


@pytest.fixture(scope="session")
def four_rod_model(four_rod_rf):
    """Four-rod trap driven at q close to 0.2 (beryllium-9, 100 MHz)."""
    import math

    from surftrap.geometry import DriveConfig
    from surftrap.pseudo import analyze, build_model

    g = four_rod_rf.geometry
    omega = 2 * math.pi * 100e6
    probe = analyze(build_model(g, DriveConfig(1.0, omega), basis=four_rod_rf))
    V0 = 0.2 / probe.q_params[0]
    return build_model(g, DriveConfig(V0, omega), basis=four_rod_rf)
