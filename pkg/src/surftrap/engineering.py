"""Engineering estimates: RF dissipation, filter roll-off, substrate data,
layered-trap aspect-ratio scans and substrate dielectric sensitivity."""

import csv
import hashlib
import io
import json
import logging
import math
from dataclasses import asdict, dataclass
from importlib import resources

import numpy as np

from .geometry import BERYLLIUM_9, DriveConfig, build_canonical
from .laplace import DEFAULT_TOL, DielectricMap, field_of, make_grid, solve_rf
from .pseudo import TrapError, analyze, build_model

log = logging.getLogger(__name__)

MATERIALS_FILE = "materials.json"


class EngineeringError(ValueError):
    pass


# --------------------------------------------------------------------------
# dissipation


@dataclass(frozen=True)
class DissipationInput:
    C: float  # F, RF electrode to ground
    omega: float  # rad/s
    V0: float  # V peak
    R_lead: float = 0.0  # ohm
    tan_delta: float = 0.0

    def __post_init__(self):
        if not (self.C > 0 and self.omega > 0):
            raise EngineeringError("C and omega must be positive")
        if min(self.V0, self.R_lead, self.tan_delta) < 0:
            raise EngineeringError("V0, R_lead and tan_delta must be non-negative")


@dataclass(frozen=True)
class DissipationResult:
    I_rms: float
    R_esr: float
    P_lead: float
    P_dielectric: float
    P_total: float

    def to_dict(self):
        return asdict(self)


def dissipated_power(inp):
    """I_rms^2 (R_lead + R_esr) for a capacitive load driven at V0 peak."""
    v_rms = inp.V0 / math.sqrt(2)
    i_rms = inp.C * inp.omega * v_rms
    r_esr = inp.tan_delta / (inp.C * inp.omega)
    p_lead = i_rms ** 2 * inp.R_lead
    p_diel = i_rms ** 2 * r_esr
    return DissipationResult(i_rms, r_esr, p_lead, p_diel, p_lead + p_diel)


def rc_rolloff(R, C):
    """-3 dB corner frequency (Hz) of a first-order RC low-pass."""
    if not (R > 0 and C > 0):
        raise EngineeringError("R and C must be positive")
    return 1.0 / (2 * math.pi * R * C)


# --------------------------------------------------------------------------
# materials


@dataclass(frozen=True)
class MaterialRecord:
    name: str
    thermal_conductivity: float  # W/(m K)
    resistivity: float  # ohm cm
    dielectric_constant: float
    tan_delta: float
    roughness: float  # nm
    dielectric_strength: float  # kV/mm


MATERIAL_FIELDS = tuple(MaterialRecord.__dataclass_fields__)


def _rows_digest(rows):
    blob = json.dumps(rows, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def materials_db():
    """Substrate property table as an immutable tuple of records.

    The shipped JSON carries a SHA-256 of its rows; a mismatch raises.
    """
    doc = json.loads(resources.files("surftrap.data").joinpath(MATERIALS_FILE)
                     .read_text(encoding="utf-8"))
    rows = doc["materials"]
    if _rows_digest(rows) != doc["sha256"]:
        raise EngineeringError("materials database checksum mismatch")
    return tuple(MaterialRecord(**r) for r in rows)


def material(name):
    for rec in materials_db():
        if rec.name.lower() == name.lower():
            return rec
    raise KeyError(f"unknown material {name!r}")


def materials_csv(records=None):
    records = materials_db() if records is None else records
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MATERIAL_FIELDS)
    for r in records:
        w.writerow([getattr(r, f) if f == "name" else repr(getattr(r, f)) for f in MATERIAL_FIELDS])
    return buf.getvalue()


# --------------------------------------------------------------------------
# aspect-ratio scan of the three-layer trap

ASPECT_THICKNESS = 0.02  # electrode thickness / slot width
ASPECT_RESOLUTION = 60


@dataclass
class AspectPoint:
    gamma: float
    depth_eV: float | None
    secular_hz: float | None  # geometric mean of the two modes
    depth_rel: float | None = None
    freq_rel: float | None = None
    escape_kind: str | None = None
    excluded: str | None = None


@dataclass
class AspectFit:
    depth_exponent: float
    frequency_exponent: float
    depth_rms: float
    frequency_rms: float
    points: list
    settings: dict

    def to_dict(self):
        return {"depth_exponent": self.depth_exponent,
                "frequency_exponent": self.frequency_exponent,
                "depth_rms": self.depth_rms, "frequency_rms": self.frequency_rms,
                "points": [asdict(p) for p in self.points], "settings": self.settings}

    def to_csv(self):
        buf = io.StringIO()
        buf.write("# " + json.dumps({"fit": {k: v for k, v in self.to_dict().items()
                                             if k != "points"}}, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        cols = list(AspectPoint.__dataclass_fields__)
        w.writerow(cols)
        for p in self.points:
            w.writerow(["" if getattr(p, c) is None else getattr(p, c) for c in cols])
        return buf.getvalue()


def loglog_fit(x, y):
    """Unweighted least-squares slope in log-log space and the RMS residual."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    p = np.polyfit(lx, ly, 1)
    r = ly - np.polyval(p, lx)
    return float(p[0]), float(np.sqrt(np.mean(r ** 2)))


def aspect_ratio_exponents(gammas=(1, 1.7, 2.9, 5, 8.7, 15), d=50e-6, fixed="width",
                           drive=DriveConfig(100.0, 2 * math.pi * 100e6), species=BERYLLIUM_9,
                           resolution=ASPECT_RESOLUTION, thickness=ASPECT_THICKNESS,
                           rf_layer="middle", tol=DEFAULT_TOL):
    """Depth and secular-frequency power laws of the three-layer trap versus gamma.

    The slot width (2d) is held fixed and only the gap height changes, so
    ``fixed`` may be "width" or "d" (equivalent here).  Points that do not
    give a bounded trap are kept in the table with an exclusion note.
    """
    if fixed not in ("width", "d"):
        raise EngineeringError("fixed must be 'width' or 'd'")
    gammas = sorted(float(gm) for gm in gammas)
    if len(gammas) < 6:
        raise EngineeringError("need at least 6 gamma samples")
    points = []
    for gm in gammas:
        g = build_canonical("three_layer", d=d, gamma=gm, thickness=thickness * 2,
                            three_layer_rf=rf_layer)
        try:
            grid = make_grid(g, resolution=resolution)
            tc = analyze(build_model(g, drive, species, grid=grid, tol=tol))
        except (TrapError, ValueError) as exc:
            log.warning("gamma=%g excluded: %s", gm, exc)
            points.append(AspectPoint(gm, None, None, excluded=str(exc)))
            continue
        f = float(np.sqrt(np.prod(tc.secular_hz)))
        points.append(AspectPoint(gm, tc.depth, f, escape_kind=tc.escape_kind))
        log.info("gamma=%g depth=%.4g eV f=%.4g Hz", gm, tc.depth, f)
    ok = [p for p in points if p.excluded is None]
    if len(ok) < 3:
        raise EngineeringError("fewer than 3 usable gamma points")
    ref = min(ok, key=lambda p: abs(math.log(p.gamma)))
    for p in ok:
        p.depth_rel = p.depth_eV / ref.depth_eV
        p.freq_rel = p.secular_hz / ref.secular_hz
    de, dr = loglog_fit([p.gamma for p in ok], [p.depth_eV for p in ok])
    fe, fr = loglog_fit([p.gamma for p in ok], [p.secular_hz for p in ok])
    settings = {"d": d, "fixed": fixed, "thickness_over_width": thickness,
                "resolution": resolution, "rf_layer": rf_layer, "V0": drive.V0,
                "omega": drive.omega, "mass": species.mass, "tol": tol,
                "gamma_definition": "slot width / gap height between outer layers",
                "fit": "unweighted least squares in log-log space"}
    return AspectFit(de, fe, dr, fr, points, settings)


# --------------------------------------------------------------------------
# substrate dielectric


@dataclass
class DielectricSensitivity:
    eps: float
    max_relative_difference: float
    disc_radius: float
    center: tuple
    settings: dict

    def to_dict(self):
        return asdict(self)


def dielectric_sensitivity(g, eps_substrate, disc_radius=0.2, resolution=40, tol=DEFAULT_TOL):
    """Largest change of the RF field near the trap when a substrate is added.

    The substrate fills everything below the electrode plane.  Over a disc
    of radius ``disc_radius * d`` around the vacuum RF null the field
    difference |E_eps - E_vac| is maximized and divided by the largest
    vacuum |E| on the same disc (the field vanishes at the null itself).
    """
    if eps_substrate < 1:
        raise EngineeringError("relative permittivity must be >= 1")
    if g.label not in ("five_wire", "four_wire", "five_wire_in_plane") and not g.label.startswith("surface"):
        log.info("dielectric_sensitivity on non-surface geometry %r", g.label)
    grid = make_grid(g, resolution=resolution)
    y_plane = min(e.shape.bounds()[2] for e in g.electrodes)
    vac = solve_rf(g, grid=grid, tol=tol)
    E0 = field_of(vac.entries[0].phi, grid, vac.electrode_mask)
    model = build_model(g, DriveConfig(1.0, 1.0), grid=grid, tol=tol, basis=vac)
    center = analyze(model).r_min
    if eps_substrate == 1:
        diff = 0.0
    else:
        eps = DielectricMap.substrate(grid, y_plane, eps_substrate)
        sub = solve_rf(g, grid=grid, eps=eps, tol=tol)
        E1 = field_of(sub.entries[0].phi, grid, sub.electrode_mask)
        X, Y = grid.mesh()
        disc = np.hypot(X - center[0], Y - center[1]) <= disc_radius * g.d
        dE = np.hypot(E1.Ex - E0.Ex, E1.Ey - E0.Ey)[disc]
        diff = float(dE.max() / E0.magnitude[disc].max())
    settings = {"resolution": resolution, "tol": tol, "substrate_top": y_plane,
                "normalization": "max |E_eps - E_vac| / max |E_vac| over the disc"}
    return DielectricSensitivity(float(eps_substrate), diff, disc_radius * g.d,
                                 tuple(center), settings)
