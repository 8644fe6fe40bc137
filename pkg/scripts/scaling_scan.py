"""Depth in units of hbar*omega and secular frequency versus trap radius.

Usage: python scripts/scaling_scan.py [--preset be-quadrupole] [--fields 1e6,1e9] [--out scan.csv]
"""
import argparse

import numpy as np

from surftrap import scaling


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default="be-quadrupole", choices=scaling.preset_names())
    ap.add_argument("--fields", default="1e6,1e7,1e8,1e9", help="surface field limits in V/m")
    ap.add_argument("--rmin", type=float, default=1e-10)
    ap.add_argument("--rmax", type=float, default=1e-3)
    ap.add_argument("--points", type=int, default=71)
    ap.add_argument("--out", help="write the scan as CSV")
    args = ap.parse_args()

    s = scaling.load_preset(args.preset)
    fields = [float(v) for v in args.fields.split(",")]
    R = np.geomspace(args.rmin, args.rmax, args.points)
    points = scaling.scan(s, R, fields)
    for E0 in fields:
        sub = s.with_field(E0)
        print(f"E0={E0:.0e} V/m: one quantum at R={scaling.min_radius_for_ratio(sub, 1) * 1e9:.3f} nm, "
              f"100 quanta at R={scaling.min_radius_for_ratio(sub, 100) * 1e9:.2f} nm")
    print(f"drive/secular = {scaling.drive_to_secular_ratio(s.q):.3f}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(scaling.scan_to_csv(points))


if __name__ == "__main__":
    main()
