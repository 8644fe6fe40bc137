"""Three-layer depth and frequency power laws in the aspect ratio gamma.

Usage: python scripts/aspect_scan.py [--gammas 1,1.7,2.9,5,8.7,15] [--resolution 60] [--out scan.csv]
"""
import argparse

from surftrap.engineering import ASPECT_RESOLUTION, aspect_ratio_exponents


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gammas", default="1,1.7,2.9,5,8.7,15")
    ap.add_argument("--resolution", type=int, default=ASPECT_RESOLUTION)
    ap.add_argument("--rf-layer", choices=("middle", "outer"), default="middle")
    ap.add_argument("--out", help="write the point table as CSV")
    args = ap.parse_args()

    gammas = [float(g) for g in args.gammas.split(",")]
    fit = aspect_ratio_exponents(gammas, resolution=args.resolution, rf_layer=args.rf_layer)
    for p in fit.points:
        print(p)
    print(f"depth exponent {fit.depth_exponent:.3f} (rms {fit.depth_rms:.3f})")
    print(f"frequency exponent {fit.frequency_exponent:.3f} (rms {fit.frequency_rms:.3f})")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(fit.to_csv())


if __name__ == "__main__":
    main()
