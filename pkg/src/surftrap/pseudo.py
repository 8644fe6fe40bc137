"""Pseudopotential analysis of solved RF trap cross-sections.

The ponderomotive potential of an RF field with peak amplitude E is
U = Q^2 |E|^2 / (4 m Omega^2).  Trap minima, saddles, secular frequencies
and principal axes are extracted from bicubic interpolants of U (plus the
static potential energy), and full RF trajectories can be integrated to
check the pseudopotential picture against micromotion-resolved dynamics.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np
from numba import njit
from scipy import ndimage, optimize

from . import __version__
from .geometry import BERYLLIUM_9, DriveConfig, Species, StaticConfig, build_canonical
from .interp import BicubicSurface, spline_eval
from .laplace import (DEFAULT_MARGIN, DEFAULT_TOL, FieldMap, field_of, make_grid, solve_basis,
                      superpose)


class TrapError(RuntimeError):
    """No usable trap (missing minimum, saddle instead of minimum, escape)."""


# --------------------------------------------------------------------------
# pseudopotential


@dataclass
class PseudoField:
    U: np.ndarray  # joules
    grid: object
    species: Species
    omega: float
    free: np.ndarray  # True off electrodes

    def energy_with(self, static):
        """Pseudopotential plus static potential energy (joules)."""
        if static is None:
            return self.U
        return self.U + self.species.charge * np.asarray(static)


def pseudopotential_field(rf_field: FieldMap, species, omega, free=None):
    """U = Q^2 |E_peak|^2 / (4 m Omega^2) from the peak RF field map."""
    e2 = rf_field.Ex ** 2 + rf_field.Ey ** 2
    U = species.charge ** 2 * e2 / (4 * species.mass * omega ** 2)
    if free is None:
        free = np.ones(U.shape, bool)
    return PseudoField(U, rf_field.grid, species, float(omega), free)


def _filled(arr, free):
    """Copy of ``arr`` with non-free nodes replaced by the nearest free value."""
    if free.all():
        return arr
    idx = ndimage.distance_transform_edt(~free, return_distances=False, return_indices=True)
    return arr[tuple(idx)]


class LocalSurfaces:
    """Bicubic interpolants of a node array over windows of the grid."""

    def __init__(self, arr, grid, free, half_width):
        self.arr = _filled(arr, free)
        self.grid = grid
        self.free = free
        self.half = max(int(half_width), 8)
        self._cache = {}

    def at(self, x, y):
        g = self.grid
        i, j = g.index(x, y)
        # snap the window centre to a coarse lattice so nearby calls share it
        step = max(self.half // 2, 1)
        ci = min(max(round(i / step) * step, 0), g.nx - 1)
        cj = min(max(round(j / step) * step, 0), g.ny - 1)
        key = (ci, cj)
        if key not in self._cache:
            i0, i1 = max(ci - self.half, 0), min(ci + self.half + 1, g.nx)
            j0, j1 = max(cj - self.half, 0), min(cj + self.half + 1, g.ny)
            self._cache[key] = BicubicSurface(g.xs[i0:i1], g.ys[j0:j1], self.arr[i0:i1, j0:j1])
        return self._cache[key]

    def derivatives(self, x, y):
        return self.at(x, y).derivatives(x, y)

    def near_electrode(self, x, y, cells=2):
        i, j = self.grid.index(x, y)
        sl = (slice(max(i - cells, 0), i + cells + 1), slice(max(j - cells, 0), j + cells + 1))
        return not self.free[sl].all()


def find_stationary(surf, x, y, kind="any", h=None, maxiter=60, gtol=None):
    """Newton iteration on the gradient of an interpolated surface.

    ``kind='min'`` falls back to damped gradient steps where the Hessian is
    not positive definite.  Steps are clipped to ``h`` (a grid spacing).
    Returns ``(x, y, converged)``.
    """
    h = h or surf.grid.h
    p = np.array([x, y], float)
    for _ in range(maxiter):
        v = surf.derivatives(*p)
        g = v[1:3]
        H = np.array([[v[3], v[4]], [v[4], v[5]]])
        evals = np.linalg.eigvalsh(H)
        if kind == "min" and evals[0] <= 0:
            gn = np.linalg.norm(g)
            if gn == 0:
                return p[0], p[1], False
            step = -g / gn * h * 0.5
        else:
            try:
                step = -np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                return p[0], p[1], False
        n = np.linalg.norm(step)
        if n > h:
            step *= h / n
        p = p + step
        if not surf.grid.contains(*p):
            return p[0], p[1], False
        if n < 1e-7 * h:
            return p[0], p[1], True
    return p[0], p[1], False


# --------------------------------------------------------------------------
# characterization


@dataclass
class TrapCharacterization:
    r_min: tuple[float, float]
    hessian: list  # 2x2, J/m^2, total potential
    secular_frequencies: tuple[float, float]  # rad/s, ascending
    q_params: tuple[float, float]
    principal_axes: tuple[float, float]  # degrees from the substrate plane
    depth: float  # eV
    escape_point: tuple[float, float] | None
    escape_kind: str  # "saddle" or "boundary"
    rf_hessian: list
    d_measured: float  # distance from r_min to the nearest electrode surface
    strength_dimless: float  # d^4 * mean curvature of |E|^2 / V0^2
    depth_dimless: float  # d^2 * depth in |E|^2 / V0^2
    species: dict = field(default_factory=dict)
    drive: dict = field(default_factory=dict)
    normalized_f: float | None = None
    normalized_u: float | None = None
    provenance: dict = field(default_factory=dict)

    @property
    def secular_hz(self):
        return tuple(w / (2 * math.pi) for w in self.secular_frequencies)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def _principal_angle(vec):
    a = math.degrees(math.atan2(vec[1], vec[0]))
    while a <= -90:
        a += 180
    while a > 90:
        a -= 180
    return a


def _interior_domain(free, grid, margin_nodes=2):
    dom = ndimage.binary_erosion(free, iterations=1, border_value=0)
    dom[:margin_nodes + 1, :] = False
    dom[-margin_nodes - 1:, :] = False
    dom[:, :margin_nodes + 1] = False
    dom[:, -margin_nodes - 1:] = False
    return dom


def locate_minimum(E, grid, free, surf=None, seed=None, region=None):
    """Trap minimum of a node energy array.

    Without a seed, the interior local minima inside ``region``
    ((x0, x1, y0, y1), default the whole grid) are refined and the lowest
    is taken; near-ties (mirror images below a planar electrode layer, say)
    go to the highest one.
    """
    if surf is None:
        surf = LocalSurfaces(E, grid, free, 12)
    if seed is not None:
        x, y, ok = find_stationary(surf, seed[0], seed[1], "min")
        if not ok:
            raise TrapError("Newton descent from the seed did not converge")
        return x, y
    dom = _interior_domain(free, grid) & _region_mask(grid, region)
    big = np.where(dom, E, np.inf)
    locmin = (big == ndimage.minimum_filter(big, size=3, mode="nearest")) & dom
    idx = np.argwhere(locmin)
    if len(idx) == 0:
        raise TrapError("no interior minimum of the trap potential")
    vals = big[locmin]
    order = np.argsort(vals)[:12]
    scale = float(np.median(np.abs(E[dom]))) or 1.0
    found = []
    for k in order:
        i, j = idx[k]
        x, y, ok = find_stationary(surf, grid.xs[i], grid.ys[j], "min")
        if not ok or surf.near_electrode(x, y):
            continue
        if any(math.hypot(x - f[1], y - f[2]) < grid.h for f in found):
            continue
        found.append((float(surf.derivatives(x, y)[0]), x, y))
    if not found:
        raise TrapError("no interior minimum of the trap potential")
    vmin = min(f[0] for f in found)
    tied = [f for f in found if f[0] <= vmin + 1e-4 * scale]
    if len(tied) == 1:
        return tied[0][1], tied[0][2]
    # several equally low minima (e.g. null points outside the electrodes
    # of a quadrupole): the deepest wins, then the highest
    ranked = []
    for v, x, y in tied[:4]:
        level, _, _ = escape_level(E, free, grid.index(x, y), rtol=1e-6)
        ranked.append((level - v, x, y))
    top = max(r[0] for r in ranked)
    best = [r for r in ranked if r[0] >= 0.99 * top]
    _, x, y = max(best, key=lambda r: r[2])
    return x, y


def _region_mask(grid, region):
    if region is None:
        return np.ones(grid.shape, bool)
    x0, x1, y0, y1 = region
    xs, ys = grid.xs[:, None], grid.ys[None, :]
    return (xs >= x0) & (xs <= x1) & (ys >= y0) & (ys <= y1)


def search_region(g, reach=3.0):
    """Electrode bounding box grown by ``reach * d``.

    Far from the electrodes the field (and the pseudopotential) decays
    toward zero, so minima are only sought near the electrodes.
    """
    x0, x1, y0, y1 = g.bounds()
    r = reach * g.d
    return (x0 - r, x1 + r, y0 - r, y1 + r)


def _sinks(free):
    """Free nodes next to the grid boundary (the unbounded region).

    Electrodes are walls: escape means crossing a pseudopotential barrier
    into the open region, as in the saddle-point picture of trap depth.
    """
    edge = np.zeros_like(free)
    edge[[1, -2], :] = True
    edge[:, [1, -2]] = True
    return edge & free


def escape_level(E, free, seed_idx, rtol=1e-10):
    """Lowest level at which the basin of ``seed_idx`` reaches the grid boundary.

    Returns ``(level, pass_index, sink_reached_directly)`` where the pass
    node is the lowest node on the rim of the basin just below that level.
    """
    sinks = _sinks(free)
    lo = float(E[seed_idx])
    hi = float(E[free].max())
    span = hi - lo

    def basin(level):
        lab, _ = ndimage.label(free & (E < level))
        k = lab[seed_idx]
        return lab == k if k else np.zeros_like(free)

    if sinks[seed_idx]:
        raise TrapError("trap minimum lies on the grid boundary")
    while hi - lo > rtol * span:
        mid = 0.5 * (lo + hi)
        if (basin(mid) & sinks).any():
            hi = mid
        else:
            lo = mid
    b = basin(lo) if lo > E[seed_idx] else np.zeros_like(free)
    b[seed_idx] = True
    rim = ndimage.binary_dilation(b) & ~b & free
    cand = np.where(rim, E, np.inf)
    p = np.unravel_index(np.argmin(cand), E.shape)
    return hi, p, bool(sinks[p])


def trap_depth(energy, grid, free, r_min, surf=None):
    """Depth (J) and escape point of the basin around ``r_min``.

    The basin is flooded until it first connects to the grid boundary; the
    lowest rim node at that level is refined to a saddle of the
    interpolated energy.  Returns ``(depth, escape_point, kind)`` where
    kind is "saddle", or "boundary" if the basin spills over the grid edge
    without a saddle (the depth is then a lower bound set by the box).
    """
    if surf is None:
        surf = LocalSurfaces(energy, grid, free, 16)
    seed = grid.index(*r_min)
    level, p, direct = escape_level(energy, free, seed)
    px, py = grid.xs[p[0]], grid.ys[p[1]]
    e_min = surf.derivatives(*r_min)[0]
    if not direct:
        x, y, ok = find_stationary(surf, px, py, "any")
        if ok and math.hypot(x - px, y - py) < 3 * grid.h:
            v = surf.derivatives(x, y)
            if v[3] * v[5] - v[4] ** 2 < 0:
                return v[0] - e_min, (x, y), "saddle"
    return level - e_min, (px, py), "saddle" if not direct else "boundary"


def stationary_points(energy, grid, free, region=None, every=5, merge=0.5):
    """All stationary points of the interpolated energy found from a seed lattice.

    ``region`` is (x0, x1, y0, y1); seeds are every ``every``-th free node.
    Points within ``merge * h`` are merged.  Returns a list of dicts with
    position, value and type ('min', 'max' or 'saddle').
    """
    surf = LocalSurfaces(energy, grid, free, 16)
    xs, ys = grid.xs, grid.ys
    dom = _interior_domain(free, grid) & _region_mask(grid, region)
    sel = np.zeros_like(dom)
    sel[::every, ::every] = True
    pts = []
    for i, j in np.argwhere(dom & sel):
        x, y, ok = find_stationary(surf, xs[i], ys[j], "any")
        if not ok or surf.near_electrode(x, y, 3) or not grid.contains(x, y):
            continue
        if region is not None and not (region[0] <= x <= region[1] and region[2] <= y <= region[3]):
            continue
        if any(math.hypot(x - q["x"], y - q["y"]) < merge * grid.h for q in pts):
            continue
        v = surf.derivatives(x, y)
        ev = np.linalg.eigvalsh([[v[3], v[4]], [v[4], v[5]]])
        kind = "min" if ev[0] > 0 else ("max" if ev[1] < 0 else "saddle")
        pts.append({"x": x, "y": y, "value": float(v[0]), "type": kind})
    return pts


def characterize(pseudo, static=None, drive=None, geometry=None, seed=None,
                 baseline=None, provenance=None):
    """Minimum, curvatures, q-parameters, axes and depth of a trap.

    ``pseudo`` is the RF pseudopotential (built at the drive amplitude),
    ``static`` an optional static potential array in volts.  ``geometry``
    supplies the electrode surfaces for the measured d.  If ``baseline``
    is given, normalized values are filled in.
    """
    grid, sp = pseudo.grid, pseudo.species
    E = pseudo.energy_with(static)
    surf = LocalSurfaces(E, grid, pseudo.free, 16)
    rf_surf = surf if static is None else LocalSurfaces(pseudo.U, grid, pseudo.free, 16)
    region = search_region(geometry) if geometry is not None else None
    x, y = locate_minimum(E, grid, pseudo.free, surf, seed, region)
    v = surf.derivatives(x, y)
    H = np.array([[v[3], v[4]], [v[4], v[5]]])
    evals, evecs = np.linalg.eigh(H)
    if evals[0] <= 0:
        raise TrapError(f"stationary point at ({x:.4g}, {y:.4g}) is a saddle, not a minimum")
    omegas = tuple(float(math.sqrt(lam / sp.mass)) for lam in evals)
    axes = tuple(_principal_angle(evecs[:, k]) for k in range(2))

    vr = rf_surf.derivatives(x, y)
    H_rf = np.array([[vr[3], vr[4]], [vr[4], vr[5]]])
    ev_rf = np.linalg.eigvalsh(H_rf)
    w_rf = np.sqrt(np.clip(ev_rf, 0, None) / sp.mass)
    q_big = 2 * math.sqrt(2) * w_rf[1] / pseudo.omega
    q_small = 2 * math.sqrt(2) * w_rf[0] / pseudo.omega

    depth_j, esc, kind = trap_depth(E, grid, pseudo.free, (x, y), surf)
    if depth_j < 0:
        raise TrapError("negative trap depth")

    V0 = drive.V0 if drive is not None else float("nan")
    d_meas = geometry.surface_distance(x, y) if geometry is not None else float("nan")
    # |E|^2 per unit V0^2 from the energy scale Q^2 / (4 m Omega^2)
    to_e2 = 4 * sp.mass * pseudo.omega ** 2 / sp.charge ** 2
    strength = float(np.mean(evals)) * to_e2 * d_meas ** 4 / V0 ** 2
    depth_dl = depth_j * to_e2 * d_meas ** 2 / V0 ** 2

    tc = TrapCharacterization(
        r_min=(float(x), float(y)),
        hessian=H.tolist(),
        secular_frequencies=omegas,
        q_params=(float(q_big), float(-q_small)),
        principal_axes=axes,
        depth=float(depth_j / abs(sp.charge)),
        escape_point=(float(esc[0]), float(esc[1])) if esc is not None else None,
        escape_kind=kind,
        rf_hessian=H_rf.tolist(),
        d_measured=float(d_meas),
        strength_dimless=float(strength),
        depth_dimless=float(depth_dl),
        species={"mass": sp.mass, "charge": sp.charge},
        drive={"V0": V0, "omega": pseudo.omega},
        provenance=dict(provenance or {}),
    )
    if baseline is not None:
        tc.normalized_f, tc.normalized_u = compare_to_reference(tc, baseline)
    return tc


def compare_to_reference(tc, baseline, check_metadata=True):
    """Secular-frequency and depth ratios against a baseline trap.

    Both traps are brought to the same axis-to-electrode distance before
    taking ratios: at fixed drive, frequencies and depths scale as 1/d^2,
    which the dimensionless strength and depth already account for.
    """
    if check_metadata:
        for key in ("mass", "charge"):
            a, b = tc.species.get(key), baseline.species.get(key)
            if a is not None and b is not None and not math.isclose(a, b, rel_tol=1e-12):
                raise ValueError(f"species {key} differs from the baseline")
        for key in ("V0", "omega"):
            a, b = tc.drive.get(key), baseline.drive.get(key)
            if a is not None and b is not None and not math.isclose(a, b, rel_tol=1e-12):
                raise ValueError(f"drive {key} differs from the baseline")
    f = math.sqrt(tc.strength_dimless / baseline.strength_dimless)
    u = tc.depth_dimless / baseline.depth_dimless
    return f, u


# --------------------------------------------------------------------------
# end-to-end helpers


@dataclass
class TrapModel:
    geometry: object
    basis: object
    drive: DriveConfig
    species: Species
    static: StaticConfig
    pseudo: PseudoField
    static_potential: np.ndarray | None

    @property
    def rf_potential(self):
        """RF potential at peak amplitude (volts)."""
        return self.drive.V0 * self.basis.potential(self.geometry.rf_indices)


def build_model(g, drive, species=BERYLLIUM_9, static=None, grid=None, eps=None,
                tol=DEFAULT_TOL, margin=DEFAULT_MARGIN, basis=None):
    """Solve the electrode bases needed for ``static`` and build the pseudopotential."""
    static = static or StaticConfig()
    volts = static.electrode_voltages(g)
    active = [k for k, v in volts.items() if v != 0.0]
    if basis is None:
        groups = [tuple(g.rf_indices)] + [(k,) for k in active]
        basis = solve_basis(g, grid, eps, tol, groups=groups, margin=margin)
    rf_phi = drive.V0 * basis.potential(g.rf_indices)
    fm = field_of(rf_phi, basis.grid, basis.electrode_mask)
    pseudo = pseudopotential_field(fm, species, drive.omega, ~basis.electrode_mask)
    static_phi = None
    if active:
        static_phi = superpose(basis, {k: volts[k] for k in active}
                               | {k: 0.0 for k in g.rf_indices})
    return TrapModel(g, basis, drive, species, static, pseudo, static_phi)


def analyze(model, seed=None, baseline=None):
    b = model.basis
    prov = {
        "tool": f"surftrap {__version__}",
        "geometry": model.geometry.label,
        "geometry_sha256": model.geometry.digest(),
        "solver": b.metadata(),
        "interpolation": "bicubic (FITPACK, s=0)",
    }
    return characterize(model.pseudo, model.static_potential, model.drive, model.geometry,
                        seed=seed, baseline=baseline, provenance=prov)


BASELINE_KIND = "two_layer"


@lru_cache(maxsize=4)
def _baseline_cached(d, resolution):
    g = build_canonical(BASELINE_KIND, d=d)
    grid = make_grid(g, resolution=resolution)
    model = build_model(g, DriveConfig(1.0, 1.0), grid=grid)
    return analyze(model)


def stored_baseline():
    """Dimensionless baseline record shipped with the package."""
    text = resources.files("surftrap").joinpath("data/baseline.json").read_text()
    return json.loads(text)


def reference_baseline(species=BERYLLIUM_9, drive=DriveConfig(1.0, 1.0), recompute=False,
                       d=50e-6, resolution=40):
    """Two-layer, unit-aspect-ratio reference trap for normalized values.

    By default the stored dimensionless strength and depth are used; with
    ``recompute`` the reference geometry is solved afresh.
    """
    if recompute:
        ref = _baseline_cached(d, resolution)
        strength, depth = ref.strength_dimless, ref.depth_dimless
    else:
        rec = stored_baseline()
        strength, depth = rec["strength_dimless"], rec["depth_dimless"]
    return TrapCharacterization(
        r_min=(0.0, 0.0), hessian=[[0, 0], [0, 0]], secular_frequencies=(0.0, 0.0),
        q_params=(0.0, 0.0), principal_axes=(0.0, 90.0), depth=0.0, escape_point=None,
        escape_kind="saddle", rf_hessian=[[0, 0], [0, 0]], d_measured=d,
        strength_dimless=strength, depth_dimless=depth,
        species={"mass": species.mass, "charge": species.charge},
        drive={"V0": drive.V0, "omega": drive.omega},
        provenance={"baseline": BASELINE_KIND, "recomputed": recompute})


# --------------------------------------------------------------------------
# trajectories


@njit(cache=True)
def _accel(txr, tyr, cr, txs, tys, cs, has_static, qm, V0, Om, t, x, y, buf, out):
    spline_eval(txr, tyr, cr, x, y, buf)
    c = V0 * math.cos(Om * t)
    ax = -c * buf[1]
    ay = -c * buf[2]
    if has_static:
        spline_eval(txs, tys, cs, x, y, buf)
        ax -= buf[1]
        ay -= buf[2]
    out[0] = qm * ax
    out[1] = qm * ay


@njit(cache=True)
def _verlet(txr, tyr, cr, txs, tys, cs, has_static, qm, V0, Om, state, dt, nsteps,
            x0, x1, y0, y1, out):
    buf = np.zeros(6)
    a = np.zeros(2)
    x, y, vx, vy = state[0], state[1], state[2], state[3]
    _accel(txr, tyr, cr, txs, tys, cs, has_static, qm, V0, Om, 0.0, x, y, buf, a)
    out[0, 0], out[0, 1], out[0, 2], out[0, 3] = x, y, vx, vy
    for n in range(nsteps):
        t = n * dt
        vx += 0.5 * dt * a[0]
        vy += 0.5 * dt * a[1]
        x += dt * vx
        y += dt * vy
        if x < x0 or x > x1 or y < y0 or y > y1:
            return n + 1
        _accel(txr, tyr, cr, txs, tys, cs, has_static, qm, V0, Om, t + dt, x, y, buf, a)
        vx += 0.5 * dt * a[0]
        vy += 0.5 * dt * a[1]
        out[n + 1, 0], out[n + 1, 1], out[n + 1, 2], out[n + 1, 3] = x, y, vx, vy
    return -1


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    drive: DriveConfig
    species: Species
    initial: tuple[float, float, float, float]
    length_scale: float
    escape_time: float | None = None

    @property
    def dt(self):
        return float(self.t[1] - self.t[0])

    def to_csv(self):
        lines = ["t,x,y,vx,vy"]
        for row in zip(self.t, self.x, self.y, self.vx, self.vy):
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


STEPS_PER_PERIOD = 50


class ParticleEscaped(TrapError):
    def __init__(self, message, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


def simulate_trajectory(rf_phi, static_phi, grid, species, drive, initial, duration,
                        steps_per_period=STEPS_PER_PERIOD, window=None, length_scale=None):
    """Integrate m r'' = Q E_rf(r) cos(Omega t) + Q E_static(r).

    ``rf_phi`` is the RF potential at 1 V on the RF electrodes (the drive
    amplitude scales it), ``static_phi`` the static potential in volts or
    None.  Fields come from bicubic interpolants over ``window``
    ((x0, x1, y0, y1), default the whole grid).  Fixed-step velocity
    Verlet with ``steps_per_period`` steps per RF period.
    """
    if steps_per_period < STEPS_PER_PERIOD:
        raise ValueError(f"need at least {STEPS_PER_PERIOD} steps per RF period")
    xs, ys = grid.xs, grid.ys
    if window is None:
        sl = (slice(None), slice(None))
    else:
        ii = np.nonzero((xs >= window[0]) & (xs <= window[1]))[0]
        jj = np.nonzero((ys >= window[2]) & (ys <= window[3]))[0]
        sl = (slice(ii[0], ii[-1] + 1), slice(jj[0], jj[-1] + 1))
    wx, wy = xs[sl[0]], ys[sl[1]]
    srf = BicubicSurface(wx, wy, rf_phi[sl])
    if static_phi is not None:
        sst = BicubicSurface(wx, wy, static_phi[sl])
        txs, tys, cs, has = sst.tx, sst.ty, sst.c, True
    else:
        txs, tys, cs, has = srf.tx, srf.ty, srf.c, False
    x0, y0 = float(initial[0]), float(initial[1])
    if not (wx[0] <= x0 <= wx[-1] and wy[0] <= y0 <= wy[-1]):
        raise ValueError("initial position outside the field window")
    dt = 2 * math.pi / (drive.omega * steps_per_period)
    nsteps = int(math.ceil(duration / dt))
    out = np.zeros((nsteps + 1, 4))
    state = np.array(initial, float)
    qm = species.charge / species.mass
    esc = _verlet(srf.tx, srf.ty, srf.c, txs, tys, cs, has, qm, drive.V0, drive.omega,
                  state, dt, nsteps, wx[0], wx[-1], wy[0], wy[-1], out)
    n = nsteps + 1 if esc < 0 else esc
    t = dt * np.arange(n)
    traj = Trajectory(t, out[:n, 0].copy(), out[:n, 1].copy(), out[:n, 2].copy(),
                      out[:n, 3].copy(), drive, species, tuple(map(float, initial)),
                      float(length_scale or grid.h * 40),
                      None if esc < 0 else float(esc * dt))
    if esc >= 0:
        raise ParticleEscaped(f"particle left the field window at t = {esc * dt:.4g} s", traj)
    return traj


def trajectory_for_model(model, initial, duration, **kw):
    """Trajectory in a solved model (RF at 1 V basis, drive amplitude applied)."""
    rf = model.basis.potential(model.geometry.rf_indices)
    return simulate_trajectory(rf, model.static_potential, model.basis.grid, model.species,
                               model.drive, initial, duration,
                               length_scale=model.geometry.d, **kw)


# --------------------------------------------------------------------------
# spectra


@dataclass
class MotionSpectrum:
    axis: str
    secular_omega: float  # rad/s
    secular_amplitude: float  # m
    lower_sideband: float  # amplitude at Omega - omega
    upper_sideband: float  # amplitude at Omega + omega
    drive_amplitude: float  # amplitude at Omega (excess micromotion)
    mean: float

    @property
    def ratio(self):
        return (self.lower_sideband + self.upper_sideband) / self.secular_amplitude


def _design(t, freqs):
    cols = [np.ones_like(t)]
    for w in freqs:
        cols += [np.cos(w * t), np.sin(w * t)]
    return np.column_stack(cols)


def motion_spectrum(traj, axis=None):
    """Least-squares amplitudes of the secular line, its RF sidebands and the RF line.

    The secular frequency is located from the windowed FFT peak below
    Omega/2 and refined by nonlinear least squares.
    """
    if axis is None:
        axis = "x" if np.ptp(traj.x) >= np.ptp(traj.y) else "y"
    u = getattr(traj, axis)
    t = traj.t
    Om = traj.drive.omega
    periods = t[-1] * Om / (2 * math.pi)
    if periods < 40:
        raise ValueError("trajectory too short for spectral analysis")
    u0 = u - u.mean()
    if np.ptp(u0) < 1e-9 * traj.length_scale:
        raise ValueError("no resolvable secular motion (trajectory is on the trap axis)")
    n = len(u0)
    spec = np.abs(np.fft.rfft(u0 * np.hanning(n)))
    f = np.fft.rfftfreq(n, traj.dt) * 2 * math.pi
    band = (f > 0) & (f < 0.5 * Om)
    if not band.any():
        raise ValueError("secular peak not resolvable")
    k = np.argmax(np.where(band, spec, 0))
    # parabolic interpolation of the log peak
    if 0 < k < len(spec) - 1:
        a, b, c = np.log(spec[k - 1:k + 2] + 1e-300)
        off = 0.5 * (a - c) / (a - 2 * b + c)
        w0 = f[k] + off * (f[1] - f[0])
    else:
        w0 = f[k]

    def resid(p):
        A = _design(t, [p[0], Om - p[0], Om + p[0], Om])
        coef, *_ = np.linalg.lstsq(A, u, rcond=None)
        return A @ coef - u

    sol = optimize.least_squares(resid, [w0], x_scale=[w0], xtol=1e-14, ftol=1e-14)
    w = float(sol.x[0])
    A = _design(t, [w, Om - w, Om + w, Om])
    coef, *_ = np.linalg.lstsq(A, u, rcond=None)
    amp = [math.hypot(coef[1 + 2 * i], coef[2 + 2 * i]) for i in range(4)]
    if amp[0] < 1e-9 * traj.length_scale:
        raise ValueError("no resolvable secular motion (trajectory is on the trap axis)")
    return MotionSpectrum(axis, w, amp[0], amp[1], amp[2], amp[3], float(coef[0]))


def micromotion_ratio(traj, axis=None):
    """Sum of the two RF sideband amplitudes over the secular amplitude (about q/2)."""
    return motion_spectrum(traj, axis).ratio


def spectrum_peaks(traj, axis=None, count=5):
    """Largest peaks (rad/s, relative height) of the windowed DFT of one coordinate."""
    if axis is None:
        axis = "x" if np.ptp(traj.x) >= np.ptp(traj.y) else "y"
    u = getattr(traj, axis)
    u0 = u - u.mean()
    n = len(u0)
    spec = np.abs(np.fft.rfft(u0 * np.hanning(n)))
    f = np.fft.rfftfreq(n, traj.dt) * 2 * math.pi
    peaks = [k for k in range(1, len(spec) - 1) if spec[k] >= spec[k - 1] and spec[k] > spec[k + 1]]
    peaks.sort(key=lambda k: -spec[k])
    top = spec[peaks[0]] if peaks else 1.0
    return [(float(f[k]), float(spec[k] / top)) for k in peaks[:count]]
