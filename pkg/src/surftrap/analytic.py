"""Line-charge models of quadrupole and surface traps.

Each electrode is replaced by a line charge.  With the complex potential
w(z) = -sum_k s_k ln(z - z_k) (strengths in units of 2 pi eps0), the field
follows from dw/dz = -Ex + i Ey and Upsilon = |dw/dz|^2 is proportional
to the pseudopotential.  Minima of Upsilon are zeros of f = dw/dz and its
other stationary points (the escape "maxima", saddles of the surface) are
zeros of f'.  Both are found exactly as polynomial roots.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import bisect, brentq
from skimage import measure

SQRT3 = math.sqrt(3.0)


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class LineCharge:
    position: complex
    strength: float

    def __post_init__(self):
        if not np.isfinite(complex(self.position)):
            raise OracleError("line charge position must be finite")
        if self.strength == 0:
            raise OracleError("line charge strength must be nonzero")


@dataclass(frozen=True)
class LineChargeSystem:
    charges: tuple[LineCharge, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "charges", tuple(self.charges))
        if len(self.charges) < 2:
            raise OracleError("a line-charge system needs at least two charges")

    @property
    def positions(self):
        return np.array([c.position for c in self.charges], complex)

    @property
    def strengths(self):
        return np.array([c.strength for c in self.charges], float)

    def scaled_strengths(self, mask, factor):
        """Copy with the strengths selected by ``mask`` multiplied by ``factor``."""
        return LineChargeSystem(
            [LineCharge(c.position, c.strength * (factor if m else 1.0))
             for c, m in zip(self.charges, mask)], self.label)

    def to_dict(self):
        return {"label": self.label,
                "charges": [{"x": c.position.real, "y": c.position.imag, "strength": c.strength}
                            for c in self.charges]}


def quadrupole_system():
    """Positive charges at +-1, negative at +-i."""
    return LineChargeSystem([LineCharge(1, 1), LineCharge(-1, 1),
                             LineCharge(1j, -1), LineCharge(-1j, -1)], "quadrupole")


def four_wire_system(inner=1.0):
    """Positive charges at -1/2 and 3/2, negative at -3/2 and 1/2.

    ``inner`` scales the two inner charges (at +-1/2).
    """
    return LineChargeSystem([LineCharge(-0.5, inner), LineCharge(1.5, 1.0),
                             LineCharge(-1.5, -1.0), LineCharge(0.5, -inner)], "four_wire")


# --------------------------------------------------------------------------
# potentials


def _check_off_charges(sys, z):
    d = np.abs(np.subtract.outer(np.asarray(z, complex), sys.positions))
    if np.any(d == 0):
        raise OracleError("evaluation point coincides with a line charge")


def complex_potential(sys, z):
    _check_off_charges(sys, z)
    z = np.asarray(z, complex)
    return -sum(s * np.log(z - p) for p, s in zip(sys.positions, sys.strengths))


def dw_dz(sys, z, order=1):
    """Derivative of the complex potential (order 1, 2 or 3)."""
    z = np.asarray(z, complex)
    sign = {1: -1.0, 2: 1.0, 3: -2.0}[order]
    return sign * sum(s / (z - p) ** order for p, s in zip(sys.positions, sys.strengths))


def complex_potential_and_field(sys, z):
    """(w, E) with E = Ex + i Ey, from dw/dz = -Ex + i Ey."""
    w = complex_potential(sys, z)
    f = dw_dz(sys, z)
    return w, -np.real(f) + 1j * np.imag(f)


def upsilon(sys, z):
    _check_off_charges(sys, z)
    return np.abs(dw_dz(sys, z)) ** 2


def upsilon_gradient(sys, z):
    f, f1 = dw_dz(sys, z), dw_dz(sys, z, 2)
    g = f1 * np.conj(f)
    return np.array([2 * g.real, -2 * g.imag])


def upsilon_hessian(sys, z):
    f, f1, f2 = dw_dz(sys, z), dw_dz(sys, z, 2), dw_dz(sys, z, 3)
    a = f2 * np.conj(f)
    b = abs(f1) ** 2
    return np.array([[2 * a.real + 2 * b, -2 * a.imag],
                     [-2 * a.imag, -2 * a.real + 2 * b]])


def curvature_at(sys, z):
    """Curvature of Upsilon at a zero of dw/dz (isotropic there): 2 |f'|^2."""
    return 2 * abs(dw_dz(sys, z, 2)) ** 2


# --------------------------------------------------------------------------
# stationary points


def _numerators(sys):
    """Numerator polynomials of f = dw/dz and of f'."""
    P = np.polynomial.Polynomial
    ps, ss = sys.positions, sys.strengths
    num_f = P([0])
    num_f1 = P([0])
    for k, (pk, sk) in enumerate(zip(ps, ss)):
        rest = P([1])
        for j, pj in enumerate(ps):
            if j != k:
                rest = rest * P([-pj, 1])
        num_f = num_f - sk * rest
        num_f1 = num_f1 + sk * rest ** 2
    return num_f, num_f1


def _roots(poly, sys):
    coef = poly.coef
    nz = np.nonzero(np.abs(coef) > 1e-12 * np.abs(coef).max())[0]
    poly = np.polynomial.Polynomial(coef[:nz[-1] + 1])
    r = poly.roots()
    # polish on the rational function itself
    out = []
    for z in r:
        for _ in range(4):
            z = z - poly(z) / poly.deriv()(z) if poly.deriv()(z) != 0 else z
        if np.min(np.abs(z - sys.positions)) > 1e-9:
            out.append(complex(z))
    return out


def _clean(z, tol=1e-13):
    re = 0.0 if abs(z.real) < tol else z.real
    im = 0.0 if abs(z.imag) < tol else z.imag
    return complex(re, im)


def exact_stationary_points(sys):
    """(minima, critical points of dw/dz) as complex numbers."""
    nf, nf1 = _numerators(sys)
    minima = sorted({_clean(z) for z in _roots(nf, sys)}, key=lambda z: (z.imag, z.real))
    crit = sorted({_clean(z) for z in _roots(nf1, sys)}, key=lambda z: (z.imag, z.real))
    return minima, crit


def newton_stationary_search(sys, box=(-3.0, 3.0), n=31, merge=1e-6, tol=1e-12, maxiter=80):
    """Stationary points of Upsilon from a lattice of Newton seeds.

    All seeds are iterated together with the analytic gradient and Hessian.
    Returns a list of (z, kind) with kind 'min' or 'saddle' (Upsilon has
    no strict local maxima: its 'maxima' along escape paths are saddles).
    """
    lo, hi = box
    grid = np.linspace(lo, hi, n)
    z = (grid[:, None] + 1j * grid[None, :]).ravel()
    pos = sys.positions
    z = z[np.min(np.abs(z[:, None] - pos[None, :]), axis=1) >= 0.05]
    active = np.ones(z.shape, bool)
    done = np.zeros(z.shape, bool)
    with np.errstate(all="ignore"):
        for _ in range(maxiter):
            zi = z[active]
            if zi.size == 0:
                break
            gx, gy = upsilon_gradient(sys, zi)
            H = upsilon_hessian(sys, zi)
            det = H[0, 0] * H[1, 1] - H[0, 1] ** 2
            sx = -(H[1, 1] * gx - H[0, 1] * gy) / det
            sy = -(-H[0, 1] * gx + H[0, 0] * gy) / det
            nrm = np.hypot(sx, sy)
            cap = np.where(nrm > 0.25, 0.25 / nrm, 1.0)
            zi = zi + cap * (sx + 1j * sy)
            bad = (~np.isfinite(zi) | (np.abs(zi) > 10 * max(abs(lo), abs(hi)))
                   | (np.min(np.abs(zi[:, None] - pos[None, :]), axis=1) < 1e-6))
            conv = (nrm < tol) & ~bad
            idx = np.nonzero(active)[0]
            z[idx] = zi
            done[idx[conv]] = True
            active[idx[conv | bad]] = False
    found = []
    for zc in z[done]:
        zc = complex(zc)
        if not (lo <= zc.real <= hi and lo <= zc.imag <= hi):
            continue
        if np.hypot(*upsilon_gradient(sys, zc)) > 1e-9:
            continue
        if any(abs(zc - q) < merge for q, _ in found):
            continue
        ev = np.linalg.eigvalsh(upsilon_hessian(sys, zc))
        kind = "min" if ev[0] > 0 else ("max" if ev[1] < 0 else "saddle")
        if upsilon(sys, zc) < 1e-20:
            kind = "min"
        found.append((_clean(zc, 1e-10), kind))
    return found


# --------------------------------------------------------------------------
# reference results


@dataclass
class AnalyticTrapResult:
    label: str
    minima: list  # complex
    maxima: list  # complex, escape points (saddles of Upsilon)
    trap_minimum: complex
    escape_maximum: complex
    curvature_at_min: float
    upsilon_at_max: float
    frequency_ratio_vs_quadrupole: float
    depth_ratio_vs_quadrupole: float
    meta: dict = field(default_factory=dict)

    @property
    def depth_factor(self):
        """How many times shallower than the quadrupole."""
        return 1.0 / self.depth_ratio_vs_quadrupole

    def to_dict(self):
        def c(z):
            return [z.real, z.imag]
        d = asdict(self)
        d["minima"] = [c(z) for z in self.minima]
        d["maxima"] = [c(z) for z in self.maxima]
        d["trap_minimum"] = c(self.trap_minimum)
        d["escape_maximum"] = c(self.escape_maximum)
        d["depth_factor"] = self.depth_factor
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


QUADRUPOLE_CURVATURE = 32.0
QUADRUPOLE_UPSILON_MAX = 3 * SQRT3


def _escape_point(sys, zmin, crit):
    """Lowest critical point of dw/dz on the ray from the minimum away from the charges."""
    c = sys.positions.mean()
    direction = zmin - c
    if abs(direction) < 1e-12:
        # centred minimum (quadrupole): any of the symmetric saddles
        return min(crit, key=lambda z: (round(upsilon(sys, z), 12), -z.real, -z.imag))
    u = direction / abs(direction)
    on_ray = [z for z in crit
              if abs(((z - zmin) / u).imag) < 1e-9 and ((z - zmin) / u).real > 0]
    if not on_ray:
        raise OracleError("no local maximum beyond the trap minimum")
    return min(on_ray, key=lambda z: abs(z - zmin))


def analyze_system(sys, upper=True):
    """Minimum (the upper one for surface systems), escape point, curvature, ratios."""
    minima, crit = exact_stationary_points(sys)
    if not minima:
        raise OracleError("system has no field zero")
    zmin = max(minima, key=lambda z: (z.imag, z.real)) if upper else minima[0]
    zmax = _escape_point(sys, zmin, crit)
    curv = curvature_at(sys, zmin)
    ups_max = float(upsilon(sys, zmax))
    return AnalyticTrapResult(
        label=sys.label,
        minima=minima,
        maxima=crit,
        trap_minimum=zmin,
        escape_maximum=zmax,
        curvature_at_min=float(curv),
        upsilon_at_max=ups_max,
        frequency_ratio_vs_quadrupole=math.sqrt(curv / QUADRUPOLE_CURVATURE),
        depth_ratio_vs_quadrupole=ups_max / QUADRUPOLE_UPSILON_MAX,
        meta={"system": sys.to_dict()},
    )


def reference_quadrupole():
    """Closed-form quadrupole constants (checked against the exact root finder in tests)."""
    a = 1 / math.sqrt(2 * SQRT3)
    maxima = [complex(sx * a, sy * a) for sy in (-1, 1) for sx in (-1, 1)]
    return AnalyticTrapResult(
        label="quadrupole", minima=[0j], maxima=maxima, trap_minimum=0j,
        escape_maximum=complex(a, a), curvature_at_min=QUADRUPOLE_CURVATURE,
        upsilon_at_max=QUADRUPOLE_UPSILON_MAX, frequency_ratio_vs_quadrupole=1.0,
        depth_ratio_vs_quadrupole=1.0, meta={"system": quadrupole_system().to_dict()})


def reference_four_wire_surface():
    """Closed-form four-wire constants: minima at +-i sqrt(3)/2, curvature 8/3."""
    ym = math.sqrt(3 + 4 * SQRT3) / 2
    curv = 8 / 3
    ups_max = 1 / (7 + 4 * SQRT3)
    return AnalyticTrapResult(
        label="four_wire", minima=[complex(0, -SQRT3 / 2), complex(0, SQRT3 / 2)],
        maxima=[complex(0, -ym), complex(0, ym)], trap_minimum=complex(0, SQRT3 / 2),
        escape_maximum=complex(0, ym), curvature_at_min=curv, upsilon_at_max=ups_max,
        frequency_ratio_vs_quadrupole=1 / (2 * SQRT3),
        depth_ratio_vs_quadrupole=1 / (3 * (12 + 7 * SQRT3)),
        meta={"system": four_wire_system().to_dict()})


# --------------------------------------------------------------------------
# finite conductors

N_RAYS = 16


@dataclass
class ContourRadii:
    center: complex
    level: float
    radii: np.ndarray  # N_RAYS samples, from the line-charge position
    centroid: complex

    @property
    def mean_diameter(self):
        return 2 * float(self.radii.mean())

    @property
    def axis_diameters(self):
        """(horizontal, vertical) diameters through the line-charge position."""
        r, n = self.radii, len(self.radii)
        return float(r[0] + r[n // 2]), float(r[n // 4] + r[3 * n // 4])

    @property
    def circularity(self):
        """max/min radius - 1, with radii measured from the contour centroid."""
        return self._centroid_radii.max() / self._centroid_radii.min() - 1

    _centroid_radii: np.ndarray = None


def _real_potential(sys, z):
    return float(np.real(complex_potential(sys, z)))


def trace_contour(sys, center, level, half_width, resolution=81):
    """Closed equipotential around ``center`` by marching squares, sampled on N_RAYS rays.

    The polyline from marching squares is intersected with each ray and
    the crossing is polished by root finding on the exact potential.
    """
    xs = center.real + np.linspace(-half_width, half_width, resolution)
    ys = center.imag + np.linspace(-half_width, half_width, resolution)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Z = X + 1j * Y
    with np.errstate(divide="ignore", invalid="ignore"):
        V = np.real(-sum(s * np.log(Z - p) for p, s in zip(sys.positions, sys.strengths)))
    V = np.where(np.isfinite(V), V, np.sign(level) * 1e300)
    h = xs[1] - xs[0]
    best = None
    for c in measure.find_contours(V, level):
        if not np.allclose(c[0], c[-1]):
            continue
        pts = (xs[0] + h * c[:, 0]) + 1j * (ys[0] + h * c[:, 1])
        # must enclose the charge: winding angle about it is 2 pi
        ang = np.unwrap(np.angle(pts - center))
        if abs(abs(ang[-1] - ang[0]) - 2 * math.pi) < 1e-6:
            best = pts
            break
    if best is None:
        raise OracleError("no closed equipotential around the wire (diameter too large?)")
    theta = np.angle(best - center)
    rad = np.abs(best - center)
    order = np.argsort(theta)
    th_s, r_s = theta[order], rad[order]
    th_s = np.concatenate([th_s[-1:] - 2 * math.pi, th_s, th_s[:1] + 2 * math.pi])
    r_s = np.concatenate([r_s[-1:], r_s, r_s[:1]])
    radii = []
    for th in np.arange(N_RAYS) * 2 * math.pi / N_RAYS:
        t = th if th <= math.pi else th - 2 * math.pi
        r0 = float(np.interp(t, th_s, r_s))
        u = complex(math.cos(th), math.sin(th))

        def g(r):
            return _real_potential(sys, center + r * u) - level

        lo, hi = max(r0 - 2 * h, 1e-9), r0 + 2 * h
        try:
            radii.append(brentq(g, lo, hi, xtol=1e-14))
        except ValueError:
            radii.append(r0)
    radii = np.array(radii)
    poly = best
    centroid = complex(poly.real.mean(), poly.imag.mean())
    out = ContourRadii(center, level, radii, centroid)
    out._centroid_radii = np.abs(poly - centroid)
    return out


@dataclass
class FiniteConductorFit:
    charge_ratio: float
    diameter: float
    level: float
    result: AnalyticTrapResult
    inner_contour: ContourRadii
    outer_contour: ContourRadii
    diameter_mismatch: float  # relative, outer vs inner mean diameter
    normalization: str = "outer charges fixed at the quadrupole's unit strength"
    method: str = ("inner/outer charge ratio bisected until the equipotentials "
                   "through the target mean diameter coincide on all wires")

    def to_dict(self):
        def cont(c):
            h, v = c.axis_diameters
            return {"center": [float(c.center.real), float(c.center.imag)], "mean_diameter": c.mean_diameter,
                    "horizontal_diameter": h, "vertical_diameter": v,
                    "circularity": float(c.circularity),
                    "radii": c.radii.tolist()}
        return {"charge_ratio": self.charge_ratio, "diameter": self.diameter,
                "level": self.level, "diameter_mismatch": self.diameter_mismatch,
                "inner_contour": cont(self.inner_contour),
                "outer_contour": cont(self.outer_contour),
                "normalization": self.normalization, "method": self.method,
                "result": self.result.to_dict()}


def _inner_mask(sys):
    c = sys.positions.mean()
    r = np.abs(sys.positions - c)
    return r < r.mean()


def _level_for_diameter(sys, center, diameter):
    """Potential level whose closed contour around ``center`` has the given mean diameter."""
    s = sys.strengths[np.argmin(np.abs(sys.positions - center))]
    hw = diameter

    def g(level):
        return trace_contour(sys, center, level, hw).mean_diameter - diameter

    # near a line charge the potential is ~ -s ln r plus a smooth part
    base = _real_potential(sys, center + diameter / 2) + s * math.log(diameter / 2)
    lo = base - s * math.log(diameter / 2 * 0.7)
    hi = base - s * math.log(diameter / 2 * 1.3)
    if s < 0:
        lo, hi = hi, lo
    return brentq(g, lo, hi, xtol=1e-13)


def finite_conductor_fit(sys=None, wire_diameter=0.2, rtol=1e-4):
    """Inner-to-outer charge ratio giving equal-size equipotential wires.

    The equipotential of mean diameter ``wire_diameter`` around an inner
    positive wire fixes the level; the ratio is bisected until the outer
    positive wire's contour at that level has the same mean diameter (the
    negative wires follow by mirror symmetry).  The adjusted system is
    then re-analyzed.
    """
    sys = sys or four_wire_system()
    pos = sys.positions
    sep = min(abs(a - b) for i, a in enumerate(pos) for b in pos[i + 1:])
    if not 0 < wire_diameter < sep / 2:
        raise OracleError("wire diameter must be positive and below half the charge spacing")
    inner = _inner_mask(sys)
    pos_inner = pos[inner & (sys.strengths > 0)][0]
    pos_outer = pos[~inner & (sys.strengths > 0)][0]

    def mismatch(ratio):
        s = sys.scaled_strengths(inner, ratio)
        level = _level_for_diameter(s, pos_inner, wire_diameter)
        for hw in (wire_diameter, 2 * wire_diameter, sep / 2):
            try:
                outer = trace_contour(s, pos_outer, level, hw)
                return outer.mean_diameter / wire_diameter - 1
            except OracleError:
                continue
        # contour merges with a neighbour: far larger than the target
        return 1.0

    lo, hi = 1.0, 1.0
    f_lo = mismatch(lo)
    f_hi = f_lo
    while f_hi * f_lo > 0:
        hi = hi * 1.25 if f_lo > 0 else hi / 1.25
        f_hi = mismatch(hi)
        if hi > 10 or hi < 0.1:
            raise OracleError("charge ratio search failed")
    ratio = bisect(mismatch, min(lo, hi), max(lo, hi), xtol=rtol * 1e-2, rtol=rtol * 1e-2)
    adj = sys.scaled_strengths(inner, ratio)
    level = _level_for_diameter(adj, pos_inner, wire_diameter)
    ci = trace_contour(adj, pos_inner, level, wire_diameter)
    co = trace_contour(adj, pos_outer, level, wire_diameter)
    result = analyze_system(adj)
    result.label = f"{sys.label} (finite conductors, diameter {wire_diameter:g})"
    return FiniteConductorFit(ratio, wire_diameter, level, result, ci, co,
                              co.mean_diameter / ci.mean_diameter - 1)


# --------------------------------------------------------------------------
# sampling


def sample_upsilon(sys, extent=(-3.0, 3.0, -3.0, 3.0), n=301):
    """Upsilon on a regular grid (x index first), NaN at charge positions."""
    xs = np.linspace(extent[0], extent[1], n)
    ys = np.linspace(extent[2], extent[3], n)
    Z = xs[:, None] + 1j * ys[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        U = np.abs(dw_dz(sys, Z)) ** 2
    U[~np.isfinite(U)] = np.nan
    return xs, ys, U


# --------------------------------------------------------------------------
# conductor realizations on the grid


def disc_realization(sys, d=1e-4, diameter=0.05):
    """Thin grounded-box conductor model of a line-charge system.

    Each charge becomes a disc of the given diameter (in separation units,
    scaled so one unit is ``d`` meters).  Disc voltages are the circle mean
    of Re w, so the discs carry the prescribed charges up to O(diameter^2).
    Returns ``(geometry, voltages)`` with voltages keyed by electrode index.
    """
    from .geometry import CrossSectionGeometry, Disc, Electrode

    pos, s = sys.positions, sys.strengths
    if abs(s.sum()) > 1e-12:
        raise OracleError("grid realization needs a neutral system (box at 0 V)")
    r = diameter / 2
    volts = {}
    electrodes = []
    ctl = 0
    for k, (p, q) in enumerate(zip(pos, s)):
        others = sum(sj * math.log(abs(p - pj)) for j, (pj, sj) in enumerate(zip(pos, s)) if j != k)
        volts[k] = float(-q * math.log(r) - others)
        # roles only label the two polarities; every disc is solved separately
        role, idx = ("rf", None) if q > 0 else ("control", ctl)
        ctl += q <= 0
        electrodes.append(Electrode(Disc((p.real * d, p.imag * d), r * d), role, idx,
                                    name=f"charge_{k}"))
    return CrossSectionGeometry(tuple(electrodes), d, f"{sys.label}_discs"), volts


@dataclass
class RealizationCheck:
    label: str
    minimum: complex  # separation units
    escape_point: complex | None
    curvature_at_min: float  # mean Hessian eigenvalue of |E|^2, scaled to units
    upsilon_at_max: float
    oracle: AnalyticTrapResult
    resolution: int

    @property
    def minimum_error(self):
        return abs(self.minimum - self.oracle.trap_minimum)

    def to_dict(self):
        c = (lambda z: None if z is None else [z.real, z.imag])
        return {"label": self.label, "minimum": c(self.minimum),
                "escape_point": c(self.escape_point),
                "curvature_at_min": self.curvature_at_min, "upsilon_at_max": self.upsilon_at_max,
                "oracle_minimum": c(self.oracle.trap_minimum),
                "oracle_curvature": self.oracle.curvature_at_min,
                "oracle_upsilon_max": self.oracle.upsilon_at_max,
                "minimum_error": self.minimum_error, "resolution": self.resolution}


def solve_realization(sys, d=1e-4, diameter=0.1, resolution=40, tol=1e-9, margin=None):
    """Grid solve of :func:`disc_realization` analyzed like a trap.

    |E|^2 plays the role of the pseudopotential; the minimum, its curvature
    and the escape level are returned in separation units for comparison
    with the exact line-charge values.  ``margin`` (in units of d) defaults
    to 8, or 16 when the system carries a net dipole moment, whose slow
    decay couples to the grounded box.
    """
    from .geometry import DriveConfig, Species
    from .laplace import field_of, make_grid, solve_fixed
    from .pseudo import characterize, pseudopotential_field

    if margin is None:
        dipole = abs(np.sum(sys.strengths * sys.positions))
        margin = 16.0 if dipole > 1e-9 else 8.0
    oracle = analyze_system(sys)
    g, volts = disc_realization(sys, d, diameter)
    sol = solve_fixed(g, volts, make_grid(g, resolution=resolution, margin=margin), tol=tol)
    fm = field_of(sol.phi, sol.grid, sol.electrode_mask)
    # Q^2 / (4 m Omega^2) = 1 makes U = |E|^2
    unit = Species(0.25, 1.0)
    pseudo = pseudopotential_field(fm, unit, 1.0, ~sol.electrode_mask)
    z0 = oracle.trap_minimum
    tc = characterize(pseudo, geometry=g, drive=DriveConfig(1.0, 1.0),
                      seed=(z0.real * d, z0.imag * d))
    curv = float(np.mean(np.linalg.eigvalsh(tc.hessian))) * d ** 4
    esc = None if tc.escape_point is None else complex(*tc.escape_point) / d
    return RealizationCheck(sys.label, complex(*tc.r_min) / d, esc, curv, tc.depth * d ** 2,
                            oracle, resolution)
