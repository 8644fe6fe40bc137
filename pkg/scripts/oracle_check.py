"""Grid solve of thin-disc realizations against the exact line-charge results.

Usage: python scripts/oracle_check.py [--resolution 40] [--diameter 0.1]
"""
import argparse

from surftrap.analytic import four_wire_system, quadrupole_system, solve_realization


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=int, default=40)
    ap.add_argument("--diameter", type=float, default=0.1, help="disc diameter in separation units")
    ap.add_argument("--margin", type=float, help="box margin in units of d")
    args = ap.parse_args()
    for sys_ in (quadrupole_system(), four_wire_system()):
        r = solve_realization(sys_, diameter=args.diameter, resolution=args.resolution, margin=args.margin)
        o = r.oracle
        print(f"{sys_.label}: minimum {r.minimum:.4f} (exact {o.trap_minimum:.4f}), "
              f"curvature ratio {r.curvature_at_min / o.curvature_at_min:.4f}, "
              f"depth ratio {r.upsilon_at_max / o.upsilon_at_max:.4f}", flush=True)


if __name__ == "__main__":
    main()
