"""Normalized secular frequency f and depth u of the shipped geometries.

Values are relative to the stored two-layer gamma=1 baseline, plus the
frequency ratio and depth factor of each surface trap against the four-rod
trap.  Usage: python scripts/characteristic_table.py [--resolution 40] [--out table.json]
"""
import argparse
import json

from surftrap.geometry import DriveConfig, build_canonical
from surftrap.laplace import make_grid
from surftrap.pseudo import analyze, build_model, compare_to_reference, reference_baseline

ROWS = [("three_layer", {"gamma": 1.8}), ("four_wire", {}), ("five_wire", {}),
        ("five_wire_in_plane", {}), ("four_rod", {})]
SURFACE = ("four_wire", "five_wire", "five_wire_in_plane")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=int, default=40)
    ap.add_argument("--out", help="write the table as JSON")
    args = ap.parse_args()

    base = reference_baseline()
    table = {}
    for kind, kw in ROWS:
        g = build_canonical(kind, **kw)
        tc = analyze(build_model(g, DriveConfig(1.0, 1.0), grid=make_grid(g, resolution=args.resolution)))
        f, u = compare_to_reference(tc, base, check_metadata=False)
        table[kind] = {"f": f, "u": u, "S": tc.strength_dimless, "D": tc.depth_dimless,
                       "d_measured_over_d": tc.d_measured / g.d, "escape": tc.escape_kind}
        print(f"{kind:20s} f={f:.4f} u={u:.5f} escape={tc.escape_kind}", flush=True)

    rod = table["four_rod"]
    for kind in SURFACE:
        row = table[kind]
        row["frequency_ratio_vs_four_rod"] = row["f"] / rod["f"]
        row["depth_factor_vs_four_rod"] = rod["u"] / row["u"]
        print(f"{kind:20s} vs four-rod: frequency x{row['frequency_ratio_vs_four_rod']:.3f}, "
              f"depth /{row['depth_factor_vs_four_rod']:.0f}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(table, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
