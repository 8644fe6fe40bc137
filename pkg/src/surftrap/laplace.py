"""Finite-difference Laplace solver for electrode cross-sections.

Each electrode (or group of electrodes) is solved at 1 V with every other
conductor and the outer box at 0 V, by red-black successive
over-relaxation on a uniform node grid.  Potentials for arbitrary voltage
sets are then linear combinations of these basis solutions.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

log = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 40  # nodes per d
DEFAULT_MARGIN = 8.0  # box margin in units of d
DEFAULT_TOL = 1e-9


class SolverError(RuntimeError):
    pass


class ConvergenceError(SolverError):
    def __init__(self, message, residual, sweeps):
        super().__init__(message)
        self.residual = residual
        self.sweeps = sweeps


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int
    h: float
    origin: tuple[float, float]

    def __post_init__(self):
        if self.nx < 16 or self.ny < 16:
            raise ValueError(f"grid needs at least 16x16 nodes, got {self.nx}x{self.ny}")
        if not self.h > 0:
            raise ValueError("grid spacing must be positive")

    @property
    def xs(self):
        return self.origin[0] + self.h * np.arange(self.nx)

    @property
    def ys(self):
        return self.origin[1] + self.h * np.arange(self.ny)

    @property
    def shape(self):
        return (self.nx, self.ny)

    def mesh(self):
        return np.meshgrid(self.xs, self.ys, indexing="ij")

    def index(self, x, y):
        """Nearest node indices of a point."""
        i = int(round((x - self.origin[0]) / self.h))
        j = int(round((y - self.origin[1]) / self.h))
        return i, j

    def contains(self, x, y):
        x0, y0 = self.origin
        return (x0 <= x <= x0 + (self.nx - 1) * self.h
                and y0 <= y <= y0 + (self.ny - 1) * self.h)

    def metadata(self):
        return {"nx": self.nx, "ny": self.ny, "h": self.h,
                "origin": [self.origin[0], self.origin[1]]}


def make_grid(g, h=None, margin=DEFAULT_MARGIN, resolution=DEFAULT_RESOLUTION):
    """Uniform grid enclosing ``g`` with at least ``margin * d`` on every side.

    Node positions are integer multiples of ``h`` so that electrode edges
    placed on such multiples coincide with nodes.  The box edges are
    rounded outward to whole multiples of d, so grids with h = d/n for
    different n share exactly the same box.
    """
    if h is None:
        h = g.d / resolution
    if margin < DEFAULT_MARGIN:
        raise ValueError(f"box margin must be at least {DEFAULT_MARGIN:g} d")
    x0, x1, y0, y1 = g.bounds()
    pad = margin * g.d
    n = g.d / h
    if abs(n - round(n)) < 1e-9:
        n = round(n)
        i0 = math.floor((x0 - pad) / g.d) * n
        i1 = math.ceil((x1 + pad) / g.d) * n
        j0 = math.floor((y0 - pad) / g.d) * n
        j1 = math.ceil((y1 + pad) / g.d) * n
    else:
        i0 = math.floor((x0 - pad) / h)
        i1 = math.ceil((x1 + pad) / h)
        j0 = math.floor((y0 - pad) / h)
        j1 = math.ceil((y1 + pad) / h)
    return Grid(i1 - i0 + 1, j1 - j0 + 1, h, (i0 * h, j0 * h))


@dataclass(frozen=True)
class DielectricMap:
    """Relative permittivity per node (1 everywhere by default)."""

    eps: np.ndarray | None = None
    description: str = "vacuum"
    layer: tuple | None = None  # (y_top, eps) for a planar half-space fill

    def array(self, grid):
        if self.eps is None:
            return np.ones(grid.shape)
        if self.eps.shape != grid.shape:
            raise ValueError("dielectric map does not match grid")
        return self.eps

    @property
    def uniform(self):
        return self.eps is None or bool(np.all(self.eps == self.eps.flat[0]))

    @classmethod
    def substrate(cls, grid, y_top, eps):
        """Dielectric ``eps`` filling every node strictly below ``y_top``."""
        if eps < 1:
            raise ValueError("relative permittivity must be >= 1")
        arr = np.ones(grid.shape)
        arr[:, grid.ys < y_top - 1e-9 * grid.h] = eps
        return cls(arr, f"substrate eps={eps:g} below y={y_top:g} m", (float(y_top), float(eps)))

    def faces(self, grid):
        """Face permittivities (x-faces, y-faces) for the five-point stencil.

        A planar fill places the interface exactly at ``y_top``: y-faces are
        classified by their midpoints and x-faces lying in the interface
        plane take the mean of the two media.  Other maps use harmonic
        means of the node values.
        """
        if self.layer is None:
            return face_coefficients(self.array(grid))
        y_top, eps = self.layer
        ys, tol = grid.ys, 1e-9 * grid.h
        row = np.where(ys < y_top - tol, eps, np.where(ys <= y_top + tol, 0.5 * (1 + eps), 1.0))
        fx = np.broadcast_to(row, grid.shape).copy()
        mid = np.where(ys + grid.h / 2 < y_top, eps, 1.0)
        fy = np.broadcast_to(mid, grid.shape).copy()
        return fx, fy


def rasterize(g, grid):
    """Electrode label per node: electrode index, or -1 for free space."""
    X, Y = grid.mesh()
    labels = np.full(grid.shape, -1, dtype=np.int32)
    tol = 1e-6 * grid.h
    for k, e in enumerate(g.electrodes):
        if e.shape.min_feature() < 2 * grid.h * (1 - 1e-9):
            raise SolverError(
                f"electrode {e.name!r} is thinner than two grid cells "
                f"({e.shape.min_feature():.3g} m < 2h = {2 * grid.h:.3g} m)")
        x0, x1, y0, y1 = e.shape.bounds()
        i0, j0 = grid.index(x0, y0)
        i1, j1 = grid.index(x1, y1)
        sl = (slice(max(i0 - 1, 0), min(i1 + 2, grid.nx)),
              slice(max(j0 - 1, 0), min(j1 + 2, grid.ny)))
        inside = e.shape.contains(X[sl], Y[sl], tol)
        if not inside.any():
            raise SolverError(f"electrode {e.name!r} covers no grid node")
        labels[sl][inside] = k
    border = np.zeros(grid.shape, bool)
    border[[0, -1], :] = True
    border[:, [0, -1]] = True
    if (labels[border] >= 0).any():
        raise SolverError("electrode touches the grid boundary")
    return labels


# --------------------------------------------------------------------------
# kernels


@njit(cache=True)
def _sor_uniform(phi, wfree, nsweeps):
    nx, ny = phi.shape
    for _ in range(nsweeps):
        for color in range(2):
            for i in range(1, nx - 1):
                start = 1 + ((i + 1 + color) % 2)
                row = phi[i]
                up = phi[i + 1]
                dn = phi[i - 1]
                wf = wfree[i]
                for j in range(start, ny - 1, 2):
                    row[j] += wf[j] * (0.25 * (up[j] + dn[j] + row[j + 1] + row[j - 1]) - row[j])


@njit(cache=True)
def _sor_stencil(phi, wfree, ce, cw, cn, cs, nsweeps):
    # per-node weights toward the east, west, north and south neighbours
    nx, ny = phi.shape
    for _ in range(nsweeps):
        for color in range(2):
            for i in range(1, nx - 1):
                start = 1 + ((i + 1 + color) % 2)
                for j in range(start, ny - 1, 2):
                    if wfree[i, j] == 0.0:
                        continue
                    s = (ce[i, j] * phi[i + 1, j] + cw[i, j] * phi[i - 1, j]
                         + cn[i, j] * phi[i, j + 1] + cs[i, j] * phi[i, j - 1])
                    tot = ce[i, j] + cw[i, j] + cn[i, j] + cs[i, j]
                    phi[i, j] += wfree[i, j] * (s / tot - phi[i, j])


@njit(cache=True)
def _sor_mixed(phi, wfree, si, sj, sw, somega, nsweeps):
    # uniform stencil on ordinary nodes (special nodes carry wfree = 0),
    # then the listed boundary nodes with their own normalized weights
    nx, ny = phi.shape
    n = si.shape[0]
    for _ in range(nsweeps):
        for color in range(2):
            for i in range(1, nx - 1):
                start = 1 + ((i + 1 + color) % 2)
                row = phi[i]
                up = phi[i + 1]
                dn = phi[i - 1]
                wf = wfree[i]
                for j in range(start, ny - 1, 2):
                    row[j] += wf[j] * (0.25 * (up[j] + dn[j] + row[j + 1] + row[j - 1]) - row[j])
            for k in range(n):
                i = si[k]
                j = sj[k]
                if (i + j) % 2 != color:
                    continue
                s = (sw[k, 0] * phi[i + 1, j] + sw[k, 1] * phi[i - 1, j]
                     + sw[k, 2] * phi[i, j + 1] + sw[k, 3] * phi[i, j - 1])
                phi[i, j] += somega * (s - phi[i, j])


@njit(cache=True)
def _residual(phi, free, ce, cw, cn, cs, out):
    """Correction-form residual (weighted neighbour mean minus value)."""
    nx, ny = phi.shape
    for i in range(1, nx - 1):
        for j in range(1, ny - 1):
            if not free[i, j]:
                out[i, j] = 0.0
                continue
            s = (ce[i, j] * phi[i + 1, j] + cw[i, j] * phi[i - 1, j]
                 + cn[i, j] * phi[i, j + 1] + cs[i, j] * phi[i, j - 1])
            out[i, j] = s / (ce[i, j] + cw[i, j] + cn[i, j] + cs[i, j]) - phi[i, j]


def face_coefficients(eps):
    """Harmonic means of the node permittivities on x- and y-faces."""
    cx = np.ones_like(eps)
    cy = np.ones_like(eps)
    cx[:-1, :] = 2 * eps[:-1, :] * eps[1:, :] / (eps[:-1, :] + eps[1:, :])
    cy[:, :-1] = 2 * eps[:, :-1] * eps[:, 1:] / (eps[:, :-1] + eps[:, 1:])
    return cx, cy


_DIRECTIONS = ((1, 0, 0, 1), (-1, 0, 0, -1), (0, 1, 1, 1), (0, -1, 1, -1))
MIN_FRACTION = 1e-3


def boundary_fractions(g, grid, labels):
    """Distance from each free node to the conductor surface along +x, -x, +y, -y.

    In units of h; 1 where the neighbour is not an electrode node.  Clipped
    below at ``MIN_FRACTION``.
    """
    nx, ny = grid.shape
    frac = np.ones((4, nx, ny))
    free = labels < 0
    xs, ys = grid.xs, grid.ys
    for k, (di, dj, axis, sign) in enumerate(_DIRECTIONS):
        nb = np.full(grid.shape, -1, dtype=labels.dtype)
        nb[max(-di, 0):nx - max(di, 0), max(-dj, 0):ny - max(dj, 0)] = \
            labels[max(di, 0):nx - max(-di, 0), max(dj, 0):ny - max(-dj, 0)]
        I, J = np.nonzero(free & (nb >= 0))
        owner = nb[I, J]
        for e in np.unique(owner):
            m = owner == e
            x, y = xs[I[m]], ys[J[m]]
            hit = g.electrodes[e].shape.boundary_hit(x, y, axis, sign)
            f = sign * (hit - (x if axis == 0 else y)) / grid.h
            f = np.where(np.isfinite(f) & (f < 1.0 - 1e-9), f, 1.0)
            frac[k, I[m], J[m]] = np.maximum(f, MIN_FRACTION)
    return frac


def stencil_coefficients(eps=None, fractions=None, shape=None, faces=None):
    """Five-point weights (ce, cw, cn, cs).

    ``fractions`` gives Shortley-Weller distances to conductor surfaces
    (second-order accurate for boundaries between nodes); ``eps`` adds
    harmonic-mean face permittivities, or ``faces`` gives (x, y) face
    permittivities directly.
    """
    if shape is None:
        shape = next(a for a in (eps, None if faces is None else faces[0], None if fractions is None
                                 else fractions[0]) if a is not None).shape
    ce, cw, cn, cs = (np.ones(shape) for _ in range(4))
    if fractions is not None:
        te, tw, tn, ts = fractions
        ce, cw = 2 / (te * (te + tw)), 2 / (tw * (te + tw))
        cn, cs = 2 / (tn * (tn + ts)), 2 / (ts * (tn + ts))
    if eps is not None or faces is not None:
        fx, fy = faces if faces is not None else face_coefficients(eps)
        ce = ce * fx
        cw = cw * np.roll(fx, 1, axis=0)
        cn = cn * fy
        cs = cs * np.roll(fy, 1, axis=1)
    return ce, cw, cn, cs


def _split_special(coeffs, free, wfree):
    """Separate nodes with non-unit weights for the mixed kernel.

    Returns None when too many nodes are special for the split to pay off
    (for example a dielectric filling half the box).
    """
    ce, cw, cn, cs = coeffs
    special = free & ~((ce == 1) & (cw == 1) & (cn == 1) & (cs == 1))
    count = int(special.sum())
    if count > 0.05 * free.sum():
        return None
    si, sj = np.nonzero(special)
    w = np.stack([ce[si, sj], cw[si, sj], cn[si, sj], cs[si, sj]], axis=1)
    w /= w.sum(axis=1, keepdims=True)
    wf = np.where(special, 0.0, wfree)
    return wf, si.astype(np.int64), sj.astype(np.int64), np.ascontiguousarray(w)


def optimal_omega(nx, ny):
    """Over-relaxation factor from the Jacobi spectral radius of an nx-by-ny box.

    For a square grid this is 2 / (1 + sin(pi / n)); for elongated grids
    it relaxes less aggressively, which converges much faster there.
    """
    rho = 0.5 * (math.cos(math.pi / (nx - 1)) + math.cos(math.pi / (ny - 1)))
    return 2.0 / (1.0 + math.sqrt(1.0 - rho * rho))


def sor_omega(grid):
    return optimal_omega(grid.nx, grid.ny)


def residual_field(phi, free, eps=None, coeffs=None):
    if coeffs is None:
        coeffs = stencil_coefficients(eps, shape=phi.shape)
    out = np.zeros_like(phi)
    _residual(phi, free, *coeffs, out)
    return out


def relax(fixed_values, free, eps=None, tol=DEFAULT_TOL, omega=None, check_every=20,
          max_sweeps=None, history=None, coeffs=None):
    """Red-black SOR until the max correction residual is at most ``tol``.

    ``fixed_values`` holds the Dirichlet values on non-free nodes (and the
    initial guess elsewhere).  ``coeffs`` overrides the stencil weights
    (see :func:`stencil_coefficients`).  Returns ``(phi, residual, sweeps)``.  If
    ``history`` is a list, the residual after each check is appended.
    """
    phi = np.array(fixed_values, dtype=float, copy=True)
    nx, ny = phi.shape
    if omega is None:
        omega = optimal_omega(nx, ny)
    if max_sweeps is None:
        max_sweeps = 50 * max(nx, ny) ** 2
    uniform = coeffs is None and (eps is None or bool(np.all(eps == eps.flat[0])))
    if coeffs is None:
        coeffs = stencil_coefficients(None if uniform else eps, shape=phi.shape)
    wfree = np.where(free, omega, 0.0)
    mixed = None if uniform else _split_special(coeffs, free, wfree)
    res = np.zeros_like(phi)
    sweeps = 0
    while True:
        n = min(check_every, max_sweeps - sweeps)
        if uniform:
            _sor_uniform(phi, wfree, n)
        elif mixed is not None:
            _sor_mixed(phi, mixed[0], mixed[1], mixed[2], mixed[3], omega, n)
        else:
            _sor_stencil(phi, wfree, *coeffs, n)
        sweeps += n
        _residual(phi, free, *coeffs, res)
        r = float(np.abs(res).max())
        if history is not None:
            history.append((sweeps, r))
        if r <= tol:
            return phi, r, sweeps
        if not math.isfinite(r):
            raise ConvergenceError("relaxation diverged", r, sweeps)
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"no convergence after {sweeps} sweeps (residual {r:.3e} > tol {tol:.1e})",
                r, sweeps)


# --------------------------------------------------------------------------
# basis solutions


@dataclass
class PotentialBasis:
    members: tuple[int, ...]  # electrode indices held at 1 V
    phi: np.ndarray
    residual: float
    sweeps: int


@dataclass
class BasisSet:
    geometry: object
    grid: Grid
    labels: np.ndarray  # electrode index per node, -1 for free space
    entries: list[PotentialBasis]
    eps: DielectricMap = field(default_factory=DielectricMap)
    tol: float = DEFAULT_TOL
    omega: float = 0.0
    margin: float = DEFAULT_MARGIN
    elapsed: float = 0.0
    coeffs: tuple | None = None  # stencil weights used by the solve
    boundary_fit: bool = True

    @property
    def free(self):
        free = self.labels < 0
        free[[0, -1], :] = False
        free[:, [0, -1]] = False
        return free

    @property
    def electrode_mask(self):
        return self.labels >= 0

    def entry(self, members):
        members = tuple(sorted(members))
        for e in self.entries:
            if e.members == members:
                return e
        raise KeyError(members)

    def potential(self, members):
        """Potential with ``members`` at 1 V: a grouped entry, or the sum of single ones."""
        try:
            return self.entry(members).phi
        except KeyError:
            return sum(self.entry((k,)).phi for k in members)

    def metadata(self):
        return {
            "grid": self.grid.metadata(),
            "margin_d": self.margin,
            "tol": self.tol,
            "omega": self.omega,
            "scheme": "red-black SOR, 5-point stencil, harmonic-mean face permittivity",
            "conductor_boundary": ("Shortley-Weller (sub-cell surface distance)"
                                   if self.boundary_fit else "staircase (node rasterization)"),
            "boundary": "grounded box (Dirichlet 0 V)",
            "dielectric": self.eps.description,
            "residuals": {",".join(map(str, e.members)): e.residual for e in self.entries},
            "sweeps": {",".join(map(str, e.members)): e.sweeps for e in self.entries},
        }


def _prepare(g, grid, eps, boundary_fit):
    """Node labels, free-node mask and stencil weights shared by all solves."""
    labels = rasterize(g, grid)
    free = labels < 0
    free[[0, -1], :] = False
    free[:, [0, -1]] = False
    faces = None if eps.uniform else eps.faces(grid)
    fractions = boundary_fractions(g, grid, labels) if boundary_fit else None
    if fractions is not None and np.all(fractions == 1.0):
        fractions = None  # conductors on grid nodes: plain stencil is exact
    coeffs = None
    if fractions is not None or faces is not None:
        coeffs = stencil_coefficients(None, fractions, grid.shape, faces)
    return labels, free, coeffs


def solve_basis(g, grid=None, eps=None, tol=DEFAULT_TOL, groups=None, margin=DEFAULT_MARGIN,
                boundary_fit=True):
    """Solve one unit-voltage problem per electrode (or per group).

    ``groups`` is a list of electrode-index tuples; each tuple is raised to
    1 V together.  By default every electrode is its own group.  With
    ``boundary_fit`` free nodes next to a conductor use the true distance
    to its surface; otherwise conductors are plain node staircases.
    """
    if not 0 < tol < 1e-3:
        raise ValueError("tol must lie in (0, 1e-3)")
    if grid is None:
        grid = make_grid(g, margin=margin)
    eps = eps or DielectricMap()
    labels, free, coeffs = _prepare(g, grid, eps, boundary_fit)
    if groups is None:
        groups = [(k,) for k in range(len(g.electrodes))]
    omega = sor_omega(grid)
    t0 = time.perf_counter()
    entries = []
    for members in groups:
        members = tuple(sorted(members))
        start = np.isin(labels, members).astype(float)
        phi, r, n = relax(start, free, tol=tol, omega=omega, coeffs=coeffs)
        log.info("basis %s: %d sweeps, residual %.2e", members, n, r)
        entries.append(PotentialBasis(members, phi, r, n))
    return BasisSet(g, grid, labels, entries, eps, tol, omega, margin,
                    time.perf_counter() - t0, coeffs, boundary_fit)


@dataclass
class FixedSolution:
    """Potential for one fixed set of electrode voltages."""
    phi: np.ndarray
    grid: Grid
    labels: np.ndarray
    residual: float
    sweeps: int

    @property
    def electrode_mask(self):
        return self.labels >= 0


def solve_fixed(g, voltages, grid=None, eps=None, tol=DEFAULT_TOL, margin=DEFAULT_MARGIN,
                boundary_fit=True):
    """Single solve with electrode ``k`` held at ``voltages[k]`` volts.

    Cheaper than a basis set when only one voltage combination is needed.
    ``tol`` is relative to the largest applied voltage.
    """
    if not 0 < tol < 1e-3:
        raise ValueError("tol must lie in (0, 1e-3)")
    if set(voltages) != set(range(len(g.electrodes))):
        raise ValueError("voltages must give every electrode index")
    if grid is None:
        grid = make_grid(g, margin=margin)
    eps = eps or DielectricMap()
    labels, free, coeffs = _prepare(g, grid, eps, boundary_fit)
    start = np.zeros(grid.shape)
    for k, v in voltages.items():
        start[labels == k] = v
    scale = max(abs(v) for v in voltages.values()) or 1.0
    phi, r, n = relax(start, free, tol=tol * scale, coeffs=coeffs, omega=sor_omega(grid))
    return FixedSolution(phi, grid, labels, r, n)


def solve_rf(g, grid=None, eps=None, tol=DEFAULT_TOL, margin=DEFAULT_MARGIN, boundary_fit=True):
    """Basis set with a single entry: all RF electrodes together at 1 V."""
    return solve_basis(g, grid, eps, tol, groups=[tuple(g.rf_indices)], margin=margin,
                       boundary_fit=boundary_fit)


def superpose(basis, voltages):
    """Sum of voltage-weighted basis solutions.

    ``voltages`` maps electrode index (or name) to volts and must cover
    every electrode in the basis set; grouped entries require equal
    voltages on all their members.
    """
    names = basis.geometry.names
    volts = {}
    for key, v in voltages.items():
        k = names.index(key) if isinstance(key, str) else int(key)
        volts[k] = float(v)
    total = np.zeros(basis.grid.shape)
    for e in basis.entries:
        missing = [names[k] for k in e.members if k not in volts]
        if missing:
            raise KeyError(f"no voltage given for electrode(s) {missing}")
        vals = {volts[k] for k in e.members}
        if len(vals) != 1:
            raise ValueError(f"grouped electrodes {[names[k] for k in e.members]} "
                             "need a common voltage")
        v = vals.pop()
        if v != 0.0:
            total += v * e.phi
    return total


# --------------------------------------------------------------------------
# fields


@dataclass
class FieldMap:
    Ex: np.ndarray
    Ey: np.ndarray
    grid: Grid

    @property
    def magnitude(self):
        return np.hypot(self.Ex, self.Ey)


def field_of(phi, grid, electrode_mask=None):
    """Negative gradient of ``phi``.

    Central differences at free nodes; on electrode nodes (when a mask is
    given) one-sided differences toward free neighbours, and zero inside
    conductors.
    """
    h = grid.h
    gx, gy = np.gradient(phi, h, edge_order=1)
    if electrode_mask is not None:
        m = electrode_mask
        free = ~m
        fwd_x = np.zeros_like(phi)
        bwd_x = np.zeros_like(phi)
        fwd_x[:-1] = (phi[1:] - phi[:-1]) / h
        bwd_x[1:] = (phi[1:] - phi[:-1]) / h
        fwd_y = np.zeros_like(phi)
        bwd_y = np.zeros_like(phi)
        fwd_y[:, :-1] = (phi[:, 1:] - phi[:, :-1]) / h
        bwd_y[:, 1:] = (phi[:, 1:] - phi[:, :-1]) / h
        free_xp = np.zeros_like(m)
        free_xm = np.zeros_like(m)
        free_xp[:-1] = free[1:]
        free_xm[1:] = free[:-1]
        free_yp = np.zeros_like(m)
        free_ym = np.zeros_like(m)
        free_yp[:, :-1] = free[:, 1:]
        free_ym[:, 1:] = free[:, :-1]
        ex = np.where(free_xp, fwd_x, np.where(free_xm, bwd_x, 0.0))
        ey = np.where(free_yp, fwd_y, np.where(free_ym, bwd_y, 0.0))
        gx = np.where(m, ex, gx)
        gy = np.where(m, ey, gy)
    return FieldMap(-gx, -gy, grid)


@dataclass
class ResidualReport:
    members: tuple[int, ...]
    max: float
    rms: float
    argmax: tuple[int, int]


def residual_check(basis, phis=None):
    """Max and RMS correction residual off electrodes for each basis entry.

    ``phis`` optionally maps entry members to replacement potentials; only
    those entries are then checked.
    """
    free = basis.free
    reports = []
    for e in basis.entries:
        if phis is not None and e.members not in phis:
            continue
        phi = e.phi if phis is None else phis[e.members]
        r = np.abs(residual_field(phi, free, coeffs=basis.coeffs))
        idx = np.unravel_index(np.argmax(r), r.shape)
        reports.append(ResidualReport(e.members, float(r.max()),
                                      float(np.sqrt(np.mean(r[free] ** 2))),
                                      (int(idx[0]), int(idx[1]))))
    return reports


# --------------------------------------------------------------------------
# export


def array_to_csv(arr, grid, meta=None):
    """Row-major CSV (one row per x index) preceded by ``#`` metadata lines."""
    out = io.StringIO()
    header = {"grid": grid.metadata(), "layout": "row i = x index, column j = y index"}
    header.update(meta or {})
    out.write("# " + json.dumps(header, sort_keys=True) + "\n")
    w = csv.writer(out, lineterminator="\n")
    for row in arr:
        w.writerow([repr(float(v)) for v in row])
    return out.getvalue()


def array_from_csv(text):
    lines = text.splitlines()
    meta = json.loads(lines[0][2:])
    rows = [list(map(float, r)) for r in csv.reader(lines[1:])]
    g = meta["grid"]
    return np.array(rows), Grid(g["nx"], g["ny"], g["h"], tuple(g["origin"])), meta
