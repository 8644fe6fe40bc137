"""Miniaturization limits of linear RF traps at fixed stability parameter.

With q held fixed and the surface field capped at E0 (V0 = E0 R), the drive
frequency scales as R^-1/2, the depth as R and the secular frequency as
R^-1/2, so the number of bound vibrational quanta U_max / (hbar omega)
grows as R^3/2.  Also holds the heating-rate distance-exponent classifier.
"""

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np
from scipy import constants

from .geometry import Species

PRESET_FILE = "scaling_presets.json"


class ScalingError(ValueError):
    pass


@dataclass(frozen=True)
class ScalingScenario:
    species: Species
    q: float
    E0: float  # V/m, maximum field at the electrode surfaces
    beta: float = 0.34  # depth geometry factor
    label: str = ""

    def __post_init__(self):
        if not 0 < self.q < 0.9:
            raise ScalingError(f"q must lie in (0, 0.9), got {self.q}")
        if not self.E0 > 0:
            raise ScalingError(f"E0 must be positive, got {self.E0}")
        if not 0 < self.beta <= 1:
            raise ScalingError(f"beta must lie in (0, 1], got {self.beta}")

    def with_field(self, E0):
        return ScalingScenario(self.species, self.q, E0, self.beta, self.label)

    def to_dict(self):
        return {"label": self.label, "mass_kg": self.species.mass,
                "charge_C": self.species.charge, "q": self.q, "E0_V_per_m": self.E0,
                "beta": self.beta}


@dataclass(frozen=True)
class ScalingPoint:
    R: float
    V0: float
    omega_drive: float
    U_max: float  # J
    omega_secular: float
    quantum_ratio: float
    E0: float = field(default=0.0)

    @property
    def U_max_eV(self):
        return self.U_max / constants.e

    @property
    def secular_hz(self):
        return self.omega_secular / (2 * math.pi)

    @property
    def drive_hz(self):
        return self.omega_drive / (2 * math.pi)

    def to_dict(self):
        out = asdict(self)
        out.update(U_max_eV=self.U_max_eV, secular_hz=self.secular_hz, drive_hz=self.drive_hz)
        return out


def evaluate(s, R):
    """Operating point of the scaled trap at radius ``R`` (meters)."""
    if not R > 0:
        raise ScalingError(f"R must be positive, got {R}")
    m, Q = s.species.mass, abs(s.species.charge)
    V0 = s.E0 * R
    omega = math.sqrt(2 * Q * V0 / (m * s.q * R ** 2))
    U = s.beta * s.q * Q * s.E0 * R / 8
    w = 0.5 * math.sqrt(s.q * Q * s.E0 / (m * R))
    ratio = s.beta / (4 * constants.hbar) * math.sqrt(s.q * Q * m * s.E0) * R ** 1.5
    return ScalingPoint(R, V0, omega, U, w, ratio, s.E0)


def q_from_point(s, p):
    """Stability parameter recovered from (V0, drive, R) of a point."""
    return 2 * abs(s.species.charge) * p.V0 / (s.species.mass * p.omega_drive ** 2 * p.R ** 2)


def min_radius_for_ratio(s, target=1.0):
    """Smallest R at which U_max / (hbar omega) reaches ``target``."""
    if not target >= 1:
        raise ScalingError(f"target ratio must be >= 1, got {target}")
    m, Q = s.species.mass, abs(s.species.charge)
    return (4 * constants.hbar * target / (s.beta * math.sqrt(s.q * Q * m * s.E0))) ** (2 / 3)


def drive_to_secular_ratio(q):
    return 2 * math.sqrt(2) / q


def scan(s, R_values, E0_list=None):
    """Points for every (E0, R) pair, E0-major."""
    R_values = np.asarray(R_values, float)
    if np.any(R_values <= 0) or np.any(np.diff(R_values) <= 0):
        raise ScalingError("R values must be positive and increasing")
    fields = [s.E0] if E0_list is None else list(E0_list)
    return [evaluate(s.with_field(E0), float(R)) for E0 in fields for R in R_values]


SCAN_COLUMNS = ("E0_V_per_m", "R_m", "V0_V", "drive_hz", "U_max_eV",
                "depth_in_hbar_omega", "secular_hz", "quantum_ratio")


def scan_to_csv(points):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for p in points:
        # depth in units of hbar*omega is the quantum ratio by definition
        w.writerow([repr(float(v)) for v in (p.E0, p.R, p.V0, p.drive_hz, p.U_max_eV,
                                              p.quantum_ratio, p.secular_hz, p.quantum_ratio)])
    return buf.getvalue()


def loglog_slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


# --------------------------------------------------------------------------
# presets


def _preset_doc():
    text = resources.files("surftrap.data").joinpath(PRESET_FILE).read_text(encoding="utf-8")
    return json.loads(text)


def preset_names():
    return sorted(_preset_doc()["presets"])


def load_preset(name):
    doc = _preset_doc()
    try:
        p = doc["presets"][name]
    except KeyError:
        raise ScalingError(f"unknown preset {name!r}; known: {', '.join(sorted(doc['presets']))}") from None
    species = Species.from_amu(p["mass_u"], p.get("charge_e", 1))
    return ScalingScenario(species, p["q"], p["E0_V_per_m"], p["beta"], label=name)


# --------------------------------------------------------------------------
# heating-rate distance scaling

TRANSITION_FACTOR = 10.0


@dataclass(frozen=True)
class HeatingRegime:
    exponent: int | None  # None in the transitional band
    bounds: tuple  # bounding exponents
    regime: str
    note: str = ""

    def to_dict(self):
        return asdict(self)


def heating_exponent(d, skin_depth, patch_size=None):
    """Distance exponent of the heating rate for ion-electrode distance ``d``.

    Patch potentials smaller than ``d`` give d^-4; otherwise thermal
    electrode noise gives d^-3 well inside the skin depth and d^-2 well
    outside it.  Within a factor TRANSITION_FACTOR of the skin depth the
    regime is reported as transitional.
    """
    if not (d > 0 and skin_depth > 0) or (patch_size is not None and not patch_size > 0):
        raise ScalingError("lengths must be positive")
    if patch_size is not None and patch_size < d:
        return HeatingRegime(-4, (-4, -4), "patch")
    if d < skin_depth / TRANSITION_FACTOR:
        return HeatingRegime(-3, (-3, -3), "near-field")
    if d > TRANSITION_FACTOR * skin_depth:
        return HeatingRegime(-2, (-2, -2), "far-field")
    return HeatingRegime(None, (-3, -2), "transitional",
                         f"d within a factor {TRANSITION_FACTOR:g} of the skin depth")
