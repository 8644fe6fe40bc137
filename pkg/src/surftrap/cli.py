"""Command-line front end: ``surftrap <command> ...``.

Every dimensional value takes an explicit unit suffix (``50um``, ``100MHz``,
``9u``, ``100V``); bare numbers are rejected.  Results go to stdout as JSON
and, with ``--out DIR``, to files alongside a ``manifest.json``.

Exit status: 0 success, 1 usage error, 2 physics failure.
"""

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import analytic, engineering, scaling
from .contours import ContourError, export_contours
from .geometry import (CanonicalParams, DriveConfig, GeometryError, Species, StaticConfig,
                       build_canonical, parse_spec_file)
from .laplace import DEFAULT_TOL, ConvergenceError, SolverError, make_grid
from .pseudo import (ParticleEscaped, TrapError, analyze, build_model,
                     motion_spectrum, reference_baseline, spectrum_peaks, trajectory_for_model)
from .units import UnitError, parse_quantity

log = logging.getLogger("surftrap")

KIND_CHOICES = ("four-rod", "two-layer", "three-layer", "four-wire", "five-wire",
                "five-wire-in-plane")


class UsageError(Exception):
    pass


def _q(dimension):
    def conv(text):
        try:
            return parse_quantity(text, dimension)
        except UnitError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    conv.__name__ = dimension
    return conv


def _qlist(dimension):
    def conv(text):
        return [_q(dimension)(t) for t in text.split(",") if t]
    conv.__name__ = f"{dimension} list"
    return conv


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _control(text):
    idx, _, volts = text.partition("=")
    try:
        return int(idx), parse_quantity(volts, "voltage")
    except (ValueError, UnitError):
        raise argparse.ArgumentTypeError(f"expected INDEX=VOLTS (e.g. 0=1.5V), got {text!r}") from None


# --------------------------------------------------------------------------
# run bookkeeping


class Run:
    def __init__(self, args):
        self.args = args
        self.out = Path(args.out) if args.out else None
        self.files = []
        self.manifest = {
            "command": args.command,
            "parameters": {k: v for k, v in sorted(vars(args).items())
                           if k not in ("func", "out", "verbose")},
            "tool_version": f"surftrap {__version__}",
            "geometry_sha256": None,
            "solver": None,
        }

    def write(self, name, text):
        if self.out is None:
            return
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / name).write_text(text, encoding="utf-8")
        self.files.append(name)

    def finish(self, result, echo=True):
        if result is not None:
            text = json.dumps(result, indent=2, sort_keys=True, default=_jsonable)
            if echo:
                print(text)
            self.write("result.json", text + "\n")
        if self.out is not None:
            self.manifest["outputs"] = sorted(self.files + ["manifest.json"])
            (self.out / "manifest.json").write_text(
                json.dumps(self.manifest, indent=2, sort_keys=True, default=_jsonable) + "\n",
                encoding="utf-8")


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


# --------------------------------------------------------------------------
# geometry and model helpers


def _geometry(args):
    if args.geometry:
        try:
            text = Path(args.geometry).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(str(exc)) from None
        return parse_spec_file(text)
    if not args.kind:
        raise UsageError("give --kind or --geometry")
    kw = {"d": args.d}
    if args.gamma is not None:
        kw["gamma"] = args.gamma
    if args.thickness is not None:
        kw["thickness"] = args.thickness
    return build_canonical(args.kind.replace("-", "_"), **kw)


def _species(args):
    return Species(args.mass, args.charge)


def _drive(args):
    return DriveConfig(args.v0, 2 * math.pi * args.freq)


def _static(args):
    return StaticConfig(dict(args.control or []))


def _model(args, run, g=None):
    g = g or _geometry(args)
    grid = make_grid(g, resolution=args.resolution)
    model = build_model(g, _drive(args), _species(args), _static(args), grid=grid, tol=args.tol)
    run.manifest["geometry_sha256"] = g.digest()
    run.manifest["solver"] = model.basis.metadata()
    return model


# --------------------------------------------------------------------------
# commands


def cmd_analyze(args, run):
    model = _model(args, run)
    baseline = reference_baseline(_species(args), _drive(args)) if args.normalize else None
    tc = analyze(model, baseline=baseline)
    result = json.loads(tc.to_json())
    result["secular_hz"] = list(tc.secular_hz)
    result["geometry_defaults"] = vars(CanonicalParams()) if not args.geometry else None
    if args.contours:
        U = model.pseudo.energy_with(model.static_potential) / abs(model.species.charge)
        cap = args.contour_cap if args.contour_cap is not None else 3 * tc.depth + U[model.pseudo.free].min()
        cs = export_contours(U, model.basis.grid, count=args.contour_count, cap=cap,
                             mask=~model.pseudo.free)
        run.write("contours.csv", cs.to_csv({"quantity": "pseudopotential_eV"}))
        result["contour_segments"] = cs.segment_count
    return result


def cmd_oracle(args, run):
    if args.system == "quadrupole":
        return analytic.reference_quadrupole().to_dict()
    if args.system == "four-wire":
        return analytic.reference_four_wire_surface().to_dict()
    return analytic.finite_conductor_fit(wire_diameter=args.diameter).to_dict()


def cmd_scaling(args, run):
    s = scaling.load_preset(args.preset)
    s = scaling.ScalingScenario(s.species, args.q or s.q, args.E0 or s.E0,
                                args.beta or s.beta, s.label)
    result = {"scenario": s.to_dict(), "drive_to_secular": scaling.drive_to_secular_ratio(s.q)}
    if args.R is not None:
        result["point"] = scaling.evaluate(s, args.R).to_dict()
    if args.target_ratio is not None:
        R = scaling.min_radius_for_ratio(s, args.target_ratio)
        result["min_radius_m"] = R
        result["point_at_min_radius"] = scaling.evaluate(s, R).to_dict()
    if args.scan:
        lo, hi = args.scan
        Rs = np.geomspace(lo, hi, args.points)
        pts = scaling.scan(s, Rs, args.fields or [s.E0])
        run.write("scan.csv", scaling.scan_to_csv(pts))
        result["scan_rows"] = len(pts)
    return result


def cmd_dissipation(args, run):
    inp = engineering.DissipationInput(args.C, 2 * math.pi * args.freq, args.v0,
                                       args.r_lead, args.tan_delta)
    return {"input": vars(inp) | {"freq_hz": args.freq},
            "result": engineering.dissipated_power(inp).to_dict()}


def cmd_rolloff(args, run):
    return {"R_ohm": args.R, "C_F": args.C, "rolloff_hz": engineering.rc_rolloff(args.R, args.C)}


def cmd_materials(args, run):
    recs = engineering.materials_db()
    if args.format == "csv":
        text = engineering.materials_csv(recs)
        sys.stdout.write(text)
        run.write("materials.csv", text)
        return None
    return [vars(r) for r in recs]


def cmd_scan_aspect(args, run):
    fit = engineering.aspect_ratio_exponents(args.gammas, d=args.d, drive=_drive(args),
                                             species=_species(args), resolution=args.resolution,
                                             tol=args.tol)
    run.write("aspect_scan.csv", fit.to_csv())
    return fit.to_dict()


def cmd_dielectric(args, run):
    kw = {"d": args.d}
    if args.gap is not None:
        kw["gap"] = args.gap
    g = build_canonical(args.kind.replace("-", "_"), **kw)
    run.manifest["geometry_sha256"] = g.digest()
    res = engineering.dielectric_sensitivity(g, args.eps, resolution=args.resolution, tol=args.tol)
    return res.to_dict()


def cmd_traj(args, run):
    model = _model(args, run)
    tc = analyze(model)
    x0 = tc.r_min[0] + args.offset[0]
    y0 = tc.r_min[1] + args.offset[1]
    duration = args.periods * 2 * math.pi / model.drive.omega
    traj = trajectory_for_model(model, (x0, y0, 0.0, 0.0), duration)
    run.write("trajectory.csv", traj.to_csv())
    result = {"r_min": tc.r_min, "initial": [x0, y0], "duration_s": duration,
              "peaks_rad_s": spectrum_peaks(traj, count=args.peaks),
              "pseudopotential_secular_hz": list(tc.secular_hz), "q_params": tc.q_params}
    try:
        ms = motion_spectrum(traj)
        result["spectrum"] = {"axis": ms.axis, "secular_hz": ms.secular_omega / (2 * math.pi),
                              "micromotion_ratio": ms.ratio}
    except ValueError as exc:
        result["spectrum"] = {"error": str(exc)}
    return result


# --------------------------------------------------------------------------
# parser


def _add_trap_args(p, geometry=True):
    if geometry:
        p.add_argument("--kind", choices=KIND_CHOICES)
        p.add_argument("--geometry", help="geometry document (overrides --kind)")
        p.add_argument("--gamma", type=float, help="three-layer gap width/height")
        p.add_argument("--thickness", type=float, help="electrode thickness / d")
    p.add_argument("--d", type=_q("length"), default=50e-6, help="trap distance, e.g. 50um")
    p.add_argument("--v0", type=_q("voltage"), default=100.0, help="RF amplitude, e.g. 100V")
    p.add_argument("--freq", type=_q("frequency"), default=100e6, help="RF drive, e.g. 100MHz")
    p.add_argument("--mass", type=_q("mass"), default=Species.from_amu(9).mass, help="e.g. 9u")
    p.add_argument("--charge", type=_q("charge"), default=Species.from_amu(9).charge, help="e.g. 1e")
    p.add_argument("--resolution", type=int, default=40, help="grid nodes per d")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="SOR residual tolerance")


def build_parser():
    top = argparse.ArgumentParser(prog="surftrap", description="RF trap cross-section analysis")
    top.add_argument("--version", action="version", version=f"surftrap {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="directory for output files and manifest.json")
    common.add_argument("--seed", type=int, default=0,
                        help="reserved; every computation is deterministic")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="characterize a trap")
    _add_trap_args(p)
    p.add_argument("--control", type=_control, action="append",
                   help="static control voltage INDEX=VOLTS, repeatable")
    p.add_argument("--normalize", action="store_true",
                   help="report f and u relative to the two-layer reference trap")
    p.add_argument("--contours", action="store_true", help="write contours.csv")
    p.add_argument("--contour-count", type=int, default=12)
    p.add_argument("--contour-cap", type=float, help="highest contour level in eV")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("oracle", parents=[common], help="line-charge reference systems")
    p.add_argument("--system", choices=("quadrupole", "four-wire", "finite"), default="four-wire")
    p.add_argument("--diameter", type=float, default=0.2,
                   help="finite-conductor diameter / charge spacing")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("scaling", parents=[common], help="miniaturization limits")
    p.add_argument("--preset", default="be-quadrupole", choices=scaling.preset_names())
    p.add_argument("--q", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--E0", type=_q("field"), help="surface field limit, e.g. 1e6V/m")
    p.add_argument("--R", type=_q("length"), help="evaluate at this radius, e.g. 37nm")
    p.add_argument("--target-ratio", type=float, help="U_max / hbar omega")
    p.add_argument("--scan", type=_qlist("length"), help="RMIN,RMAX for a scan CSV")
    p.add_argument("--points", type=int, default=61)
    p.add_argument("--fields", type=_qlist("field"), help="E0 values for the scan")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("dissipation", parents=[common], help="RF power dissipated in the trap")
    p.add_argument("--C", type=_q("capacitance"), required=True, help="e.g. 3pF")
    p.add_argument("--freq", type=_q("frequency"), required=True)
    p.add_argument("--v0", type=_q("voltage"), required=True)
    p.add_argument("--r-lead", type=_q("resistance"), default=0.0, help="e.g. 1ohm")
    p.add_argument("--tan-delta", type=float, default=0.0)
    p.set_defaults(func=cmd_dissipation)

    p = sub.add_parser("rolloff", parents=[common], help="RC filter corner frequency")
    p.add_argument("--R", type=_q("resistance"), required=True, help="e.g. 1kohm")
    p.add_argument("--C", type=_q("capacitance"), required=True, help="e.g. 1nF")
    p.set_defaults(func=cmd_rolloff)

    p = sub.add_parser("materials", parents=[common], help="substrate property table")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_materials)

    p = sub.add_parser("scan-aspect", parents=[common], help="three-layer aspect-ratio exponents")
    _add_trap_args(p, geometry=False)
    p.add_argument("--gammas", type=_floats, default=[1, 1.7, 2.9, 5, 8.7, 15])
    p.set_defaults(func=cmd_scan_aspect, resolution=engineering.ASPECT_RESOLUTION)

    p = sub.add_parser("dielectric", parents=[common], help="substrate permittivity sensitivity")
    p.add_argument("--kind", choices=("five-wire", "four-wire", "five-wire-in-plane"),
                   default="five-wire")
    p.add_argument("--d", type=_q("length"), default=50e-6)
    p.add_argument("--eps", type=float, default=10.0)
    p.add_argument("--gap", type=float, help="gap / electrode width")
    p.add_argument("--resolution", type=int, default=40)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_dielectric)

    p = sub.add_parser("traj", parents=[common], help="RF trajectory and motion spectrum")
    _add_trap_args(p)
    p.add_argument("--control", type=_control, action="append")
    p.add_argument("--offset", type=_qlist("length"), default=[1e-6, 1e-6],
                   help="start offset from the minimum, e.g. 1um,0.5um")
    p.add_argument("--periods", type=float, default=400, help="duration in RF periods")
    p.add_argument("--peaks", type=int, default=5)
    p.set_defaults(func=cmd_traj)
    return top


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    run = Run(args)
    try:
        result = args.func(args, run)
    except (UsageError, GeometryError, UnitError, KeyError, scaling.ScalingError,
            engineering.EngineeringError) as exc:
        print(f"surftrap: error: {exc}", file=sys.stderr)
        return 1
    except ParticleEscaped as exc:
        print(f"surftrap: physics failure: {exc}", file=sys.stderr)
        return 2
    except (TrapError, ConvergenceError, SolverError, ContourError, analytic.OracleError) as exc:
        print(f"surftrap: physics failure: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"surftrap: error: {exc}", file=sys.stderr)
        return 1
    run.finish(result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
