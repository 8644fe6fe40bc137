import numpy as np
import pytest

from surftrap.contours import ContourError, contour_levels, export_contours
from surftrap.laplace import Grid


def _grid(n=81, h=0.05):
    return Grid(n, n, h, (-(n - 1) * h / 2, -(n - 1) * h / 2))


def test_constant_field_no_contours():
    g = _grid()
    cs = export_contours(np.ones(g.shape), g)
    assert cs.segment_count == 0


def test_quadrupole_contours_are_circles():
    g = _grid()
    X, Y = g.mesh()
    U = X ** 2 + Y ** 2
    cs = export_contours(U, g, levels=[0.5, 1.0, 2.0])
    assert len(cs.lines) == 3
    for _, pts in cs.lines:
        r = np.hypot(pts[:, 0], pts[:, 1])
        assert r.std() / r.mean() < 0.01


def test_geometric_levels_and_cap():
    lv = contour_levels(np.linspace(1, 10, 100), count=5, cap=5.0)
    assert lv[-1] == pytest.approx(5.0)
    assert np.all(np.diff(np.log(lv - 1)) > 0)
    ratios = np.diff(np.log(lv - 1.0))
    assert np.allclose(ratios, ratios[0])


def test_masked_and_empty():
    g = _grid(21)
    X, Y = g.mesh()
    mask = np.hypot(X, Y) < 0.2
    cs = export_contours(X ** 2 + Y ** 2, g, levels=[0.01], mask=mask)
    assert cs.segment_count == 0
    with pytest.raises(ContourError):
        export_contours(np.zeros((3, 3)), g)


def test_csv_header():
    g = _grid(21)
    X, Y = g.mesh()
    text = export_contours(X ** 2 + Y ** 2, g, levels=[0.1]).to_csv()
    assert text.startswith("# {")
    assert text.splitlines()[1] == "level_index,level,line,x_m,y_m"
