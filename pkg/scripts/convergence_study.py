"""Grid-refinement study of the five-wire trap field and pseudopotential.

Solves at several resolutions and reports the observed order of the RF
field at the nominal trap center (0, d) and at (0, d/2), and of the
dimensionless strength and depth.
Usage: python scripts/convergence_study.py [--resolutions 20,40,80] [--staircase]
"""
import argparse
import math

from scipy.interpolate import RectBivariateSpline

from surftrap.geometry import DriveConfig, build_canonical
from surftrap.laplace import make_grid, solve_rf
from surftrap.pseudo import analyze, build_model


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kind", default="five_wire")
    ap.add_argument("--resolutions", default="20,40,80")
    ap.add_argument("--staircase", action="store_true", help="disable the boundary fit")
    args = ap.parse_args()

    g = build_canonical(args.kind)
    rows = []
    for n in (int(v) for v in args.resolutions.split(",")):
        grid = make_grid(g, resolution=n)
        basis = solve_rf(g, grid, boundary_fit=not args.staircase)
        phi = RectBivariateSpline(grid.xs, grid.ys, basis.entries[0].phi)
        e1, e2 = (-phi(0.0, y * g.d, dy=1)[0, 0] for y in (1.0, 0.5))
        tc = analyze(build_model(g, DriveConfig(1.0, 1.0), grid=grid, basis=basis))
        rows.append((n, e1, e2, tc.strength_dimless, tc.depth_dimless))
        print(f"n={n:4d} Ey(0,d)={e1:.8e} Ey(0,d/2)={e2:.8e} "
              f"S={tc.strength_dimless:.6f} D={tc.depth_dimless:.6f}", flush=True)
    for k, name in ((1, "Ey(0,d)"), (2, "Ey(0,d/2)"), (3, "S"), (4, "D")):
        for a, b, c in zip(rows, rows[1:], rows[2:]):
            num, den = abs(a[k] - b[k]), abs(b[k] - c[k])
            order = math.log2(num / den) if den > 0 and num > 0 else float("nan")
            print(f"{name}: observed order {a[0]}/{b[0]}/{c[0]} = {order:.2f}")


if __name__ == "__main__":
    main()
