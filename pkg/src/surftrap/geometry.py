"""Electrode cross-sections for linear RF traps.

A geometry is an ordered list of electrodes in the 2D plane transverse to
the trap axis.  Every electrode is an infinitely long prism whose cross
section is a disc, a rectangle, or a "half slab" (a rectangle that is long
enough to stand in for a semi-infinite plate).  All lengths are SI meters.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import constants

from .units import UnitError, format_length, parse_quantity

HALF_SLAB_MIN_EXTENT = 20.0  # in units of d


class GeometryError(ValueError):
    """Invalid electrode geometry or geometry document."""


# --------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class Disc:
    center: tuple[float, float]
    radius: float

    kind = "disc"

    def bounds(self):
        cx, cy = self.center
        r = self.radius
        return cx - r, cx + r, cy - r, cy + r

    def contains(self, x, y, tol=0.0):
        cx, cy = self.center
        return (x - cx) ** 2 + (y - cy) ** 2 <= (self.radius + tol) ** 2

    def distance(self, x, y):
        """Distance from point(s) to the surface (0 inside)."""
        cx, cy = self.center
        return np.maximum(np.hypot(x - cx, y - cy) - self.radius, 0.0)

    def boundary_hit(self, x, y, axis, sign):
        """Surface coordinate met by axis-parallel rays from outside (NaN on a miss)."""
        cx, cy = self.center
        along, across = (cx, cy) if axis == 0 else (cy, cx)
        off = (np.asarray(y) if axis == 0 else np.asarray(x)) - across
        with np.errstate(invalid="ignore"):
            half = np.sqrt(self.radius ** 2 - off ** 2)
        return along - sign * half

    def scaled(self, f):
        return Disc((self.center[0] * f, self.center[1] * f), self.radius * f)

    def min_feature(self):
        return 2 * self.radius

    def dims(self):
        return [self.radius]


@dataclass(frozen=True)
class Rectangle:
    center: tuple[float, float]
    width: float
    height: float

    kind = "rectangle"

    def bounds(self):
        cx, cy = self.center
        return (cx - self.width / 2, cx + self.width / 2,
                cy - self.height / 2, cy + self.height / 2)

    def contains(self, x, y, tol=0.0):
        x0, x1, y0, y1 = self.bounds()
        return (x >= x0 - tol) & (x <= x1 + tol) & (y >= y0 - tol) & (y <= y1 + tol)

    def distance(self, x, y):
        x0, x1, y0, y1 = self.bounds()
        dx = np.maximum(np.maximum(x0 - x, x - x1), 0.0)
        dy = np.maximum(np.maximum(y0 - y, y - y1), 0.0)
        return np.hypot(dx, dy)

    def boundary_hit(self, x, y, axis, sign):
        x0, x1, y0, y1 = self.bounds()
        lo, hi = (x0, x1) if axis == 0 else (y0, y1)
        return np.full(np.shape(x), lo if sign > 0 else hi, dtype=float)

    def scaled(self, f):
        return Rectangle((self.center[0] * f, self.center[1] * f),
                         self.width * f, self.height * f)

    def min_feature(self):
        return min(self.width, self.height)

    def dims(self):
        return [self.width, self.height]


@dataclass(frozen=True)
class HalfSlab:
    """Plate of given thickness whose inner edge sits at ``edge``.

    ``direction='right'`` extends toward +x, ``'left'`` toward -x, over
    ``extent`` meters.
    """

    edge: float
    y: float
    thickness: float
    direction: Literal["left", "right"]
    extent: float

    kind = "half_slab"

    def as_rectangle(self):
        sign = 1.0 if self.direction == "right" else -1.0
        cx = self.edge + sign * self.extent / 2
        return Rectangle((cx, self.y), self.extent, self.thickness)

    def bounds(self):
        return self.as_rectangle().bounds()

    def contains(self, x, y, tol=0.0):
        return self.as_rectangle().contains(x, y, tol)

    def distance(self, x, y):
        return self.as_rectangle().distance(x, y)

    def boundary_hit(self, x, y, axis, sign):
        return self.as_rectangle().boundary_hit(x, y, axis, sign)

    def scaled(self, f):
        return HalfSlab(self.edge * f, self.y * f, self.thickness * f,
                        self.direction, self.extent * f)

    def min_feature(self):
        return self.thickness

    def dims(self):
        return [self.thickness, self.extent]


Shape = Disc | Rectangle | HalfSlab


def shapes_overlap(a, b):
    """True when the closed shapes touch or intersect."""
    if isinstance(a, HalfSlab):
        a = a.as_rectangle()
    if isinstance(b, HalfSlab):
        b = b.as_rectangle()
    if isinstance(a, Disc) and isinstance(b, Disc):
        return math.hypot(a.center[0] - b.center[0],
                          a.center[1] - b.center[1]) <= a.radius + b.radius
    if isinstance(a, Rectangle) and isinstance(b, Rectangle):
        ax0, ax1, ay0, ay1 = a.bounds()
        bx0, bx1, by0, by1 = b.bounds()
        return ax0 <= bx1 and bx0 <= ax1 and ay0 <= by1 and by0 <= ay1
    disc, rect = (a, b) if isinstance(a, Disc) else (b, a)
    return float(rect.distance(*disc.center)) <= disc.radius


# --------------------------------------------------------------------------
# electrodes and geometry


ROLES = ("rf", "control", "ground")


@dataclass(frozen=True)
class Electrode:
    shape: Shape
    role: str
    index: int | None = None  # control index, only for role 'control'
    name: str = ""

    def __post_init__(self):
        if self.role not in ROLES:
            raise GeometryError(f"electrode {self.name!r}: unknown role {self.role!r}")
        if (self.role == "control") != (self.index is not None):
            raise GeometryError(
                f"electrode {self.name!r}: control index required for, and only for, "
                "control electrodes")

    @property
    def is_rf(self):
        return self.role == "rf"


@dataclass(frozen=True)
class CrossSectionGeometry:
    electrodes: tuple[Electrode, ...]
    d: float
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "electrodes", tuple(self.electrodes))
        validate(self)

    @property
    def names(self):
        return [e.name for e in self.electrodes]

    @property
    def rf_indices(self):
        return [k for k, e in enumerate(self.electrodes) if e.is_rf]

    @property
    def control_indices(self):
        return sorted({e.index for e in self.electrodes if e.role == "control"})

    def bounds(self):
        b = np.array([e.shape.bounds() for e in self.electrodes])
        return b[:, 0].min(), b[:, 1].max(), b[:, 2].min(), b[:, 3].max()

    def surface_distance(self, x, y):
        """Distance from (x, y) to the nearest electrode surface."""
        return min(float(e.shape.distance(x, y)) for e in self.electrodes)

    def electrode(self, name):
        for e in self.electrodes:
            if e.name == name:
                return e
        raise KeyError(name)

    def digest(self):
        return hashlib.sha256(serialize(self).encode()).hexdigest()


def validate(g):
    if g.d <= 0 or not math.isfinite(g.d):
        raise GeometryError(f"d must be positive, got {g.d!r}")
    if len(g.electrodes) < 2:
        raise GeometryError("a geometry needs at least two electrodes")
    for k, e in enumerate(g.electrodes):
        if not e.name:
            raise GeometryError(f"electrode #{k} has no name")
        if any(not (v > 0) or not math.isfinite(v) for v in e.shape.dims()):
            raise GeometryError(f"electrode {e.name!r}: dimensions must be positive")
        if isinstance(e.shape, HalfSlab):
            if e.shape.direction not in ("left", "right"):
                raise GeometryError(
                    f"electrode {e.name!r}: direction must be 'left' or 'right'")
            if e.shape.extent < HALF_SLAB_MIN_EXTENT * g.d * (1 - 1e-12):
                raise GeometryError(
                    f"electrode {e.name!r}: half-slab extent must be at least "
                    f"{HALF_SLAB_MIN_EXTENT:g} d")
    names = [e.name for e in g.electrodes]
    if len(set(names)) != len(names):
        raise GeometryError("electrode names must be unique")
    if not any(e.is_rf for e in g.electrodes):
        raise GeometryError("no RF electrode")
    if all(e.is_rf for e in g.electrodes):
        raise GeometryError("no non-RF electrode")
    idx = sorted({e.index for e in g.electrodes if e.role == "control"})
    if idx != list(range(len(idx))):
        raise GeometryError(f"control indices must be contiguous from 0, got {idx}")
    for i, a in enumerate(g.electrodes):
        for b in g.electrodes[i + 1:]:
            if shapes_overlap(a.shape, b.shape):
                raise GeometryError(f"electrodes {a.name!r} and {b.name!r} overlap")


def scale_geometry(g, factor):
    """Multiply every coordinate, dimension, and ``d`` by ``factor``."""
    if not factor > 0:
        raise GeometryError(f"scale factor must be positive, got {factor!r}")
    electrodes = [dataclasses.replace(e, shape=e.shape.scaled(factor))
                  for e in g.electrodes]
    return CrossSectionGeometry(electrodes, g.d * factor, g.label)


# --------------------------------------------------------------------------
# drive, static voltages, species


@dataclass(frozen=True)
class DriveConfig:
    V0: float  # peak RF amplitude, volts
    omega: float  # RF angular frequency, rad/s

    def __post_init__(self):
        if not (self.V0 > 0 and self.omega > 0):
            raise ValueError("V0 and omega must be positive")


@dataclass(frozen=True)
class StaticConfig:
    control_voltages: dict = field(default_factory=dict)

    def for_geometry(self, g):
        """Voltage per control index, zero-filled; rejects unknown indices."""
        known = set(g.control_indices)
        extra = set(self.control_voltages) - known
        if extra:
            raise ValueError(f"unknown control indices {sorted(extra)}")
        return {i: float(self.control_voltages.get(i, 0.0)) for i in sorted(known)}

    def electrode_voltages(self, g):
        cv = self.for_geometry(g)
        return {k: (cv[e.index] if e.role == "control" else 0.0)
                for k, e in enumerate(g.electrodes)}

    @property
    def is_zero(self):
        return all(v == 0 for v in self.control_voltages.values())


@dataclass(frozen=True)
class Species:
    mass: float  # kg
    charge: float  # C

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if self.charge == 0:
            raise ValueError("charge must be nonzero")

    @classmethod
    def from_amu(cls, amu, charge_e=1):
        return cls(amu * constants.atomic_mass, charge_e * constants.e)


BERYLLIUM_9 = Species.from_amu(9.0)


# --------------------------------------------------------------------------
# canonical builders
#
# Lateral dimensions are given in units of d.  For the planar geometries the
# lateral scale is then chosen so that the RF null of an equivalent
# zero-thickness, gapless electrode plane sits at height d (see
# ``_strip_null_height``); the true null moves by a few percent once gaps and
# thickness are included, which characterize() measures and reports.

KINDS = ("four_rod", "two_layer", "three_layer", "four_wire", "five_wire",
         "five_wire_in_plane")


@dataclass(frozen=True)
class CanonicalParams:
    d: float = 50e-6
    thickness: float = 0.10  # electrode thickness / d
    rod_radius: float = 1.0  # four_rod: rod radius / d
    gamma: float = 1.0  # three_layer: gap-region width / height
    slab_extent: float = HALF_SLAB_MIN_EXTENT  # half slab length / d
    center_width: float = 1.0  # planar: relative widths, see module docs
    rf_width: float = 1.0
    rf_width_left: float | None = None
    rf_width_right: float | None = None
    gap: float = 0.1  # planar: gap / center_width
    outer_width: float = 1.0  # planar: outer electrode width / center_width
    in_plane_rf_width: float = 2.0  # in-plane: RF rail width / d
    in_plane_gap: float = 0.2  # in-plane: rail-to-ground gap / d
    in_plane_outer_width: float = 2.0  # in-plane: ground width / d
    three_layer_rf: Literal["middle", "outer"] = "middle"
    lattice: float | None = 0.05  # planar: snap widths and gaps to this step / d
    label: str | None = None


def _strip_null_height(edges_rf):
    """Height of the RF null above x=0 for symmetric zero-thickness strips.

    ``edges_rf`` are (x0, x1) intervals (x0 > 0) held at 1 V, mirrored about
    x = 0, with the rest of the plane grounded.  On the symmetry line the
    vertical field of one strip pair vanishes where
    sum x1/(y^2+x1^2) - x0/(y^2+x0^2) = 0.
    """
    from scipy.optimize import brentq

    def ey(y):
        return sum(x1 / (y * y + x1 * x1) - x0 / (y * y + x0 * x0) for x0, x1 in edges_rf)

    ys = np.geomspace(1e-3, 1e3, 400)
    vals = [ey(y) for y in ys]
    for k in range(len(ys) - 1):
        if np.sign(vals[k]) != np.sign(vals[k + 1]):
            return brentq(ey, ys[k], ys[k + 1], xtol=1e-14)
    raise GeometryError("no RF null above the electrode plane")


def _snapper(p):
    """Rounding of planar lengths (meters) onto the lattice, if any.

    Edges on multiples of ``lattice * d`` coincide with grid nodes for
    h = d/n whenever n is a multiple of 1/lattice, which keeps refinement
    studies free of rasterization jitter.  ``even`` lengths (a centered
    electrode) use twice the step so both edges land on the lattice.
    """
    if p.lattice is None:
        return lambda v, even=False: v
    if not p.lattice > 0:
        raise GeometryError("lattice must be positive or None")
    step = p.lattice * p.d

    def snap(v, even=False):
        s = 2 * step if even else step
        return max(s, round(v / s) * s)

    return snap


def _planar_strips(widths, gap, t):
    """Left-to-right strip rectangles of the given widths, tops at y=0."""
    total = sum(widths) + gap * (len(widths) - 1)
    x = -total / 2
    rects = []
    for w in widths:
        rects.append(Rectangle((x + w / 2, -t / 2), w, t))
        x += w + gap
    return rects


def build_canonical(kind, params=None, **overrides):
    """Build one of the canonical cross-sections.

    ``params`` is a :class:`CanonicalParams`; keyword overrides are applied
    on top.  Roles follow the usual conventions: the four-rod trap has RF
    on one opposite pair; the five-wire trap has RF on the two rails next
    to a grounded center electrode; the four-wire trap alternates RF and
    control; the in-plane trap has two inner RF rails flanked by grounds.
    """
    p = dataclasses.replace(params or CanonicalParams(), **overrides)
    if kind not in KINDS:
        raise GeometryError(f"unknown geometry kind {kind!r}; expected one of {KINDS}")
    if p.d <= 0:
        raise GeometryError("d must be positive")
    builder = globals()[f"_build_{kind}"]
    electrodes = builder(p)
    label = p.label or kind
    return CrossSectionGeometry(tuple(electrodes), p.d, label)


def _build_four_rod(p):
    d, r = p.d, p.rod_radius * p.d
    c = d + r
    return [
        Electrode(Disc((c, 0.0), r), "rf", name="rf_right"),
        Electrode(Disc((0.0, c), r), "control", 0, name="ctl_top"),
        Electrode(Disc((-c, 0.0), r), "rf", name="rf_left"),
        Electrode(Disc((0.0, -c), r), "control", 1, name="ctl_bottom"),
    ]


def _build_two_layer(p):
    # slot width w and layer spacing s = w / gamma, inner corners at distance d
    d, t = p.d, p.thickness * p.d
    w = 2 * d / math.sqrt(1 + 1 / p.gamma ** 2)
    s = w / p.gamma
    ext = p.slab_extent * d
    yt, yb = s / 2 + t / 2, -s / 2 - t / 2
    return [
        Electrode(HalfSlab(-w / 2, yt, t, "left", ext), "rf", name="rf_top_left"),
        Electrode(HalfSlab(w / 2, yt, t, "right", ext), "control", 0, name="ctl_top_right"),
        Electrode(HalfSlab(w / 2, yb, t, "right", ext), "rf", name="rf_bottom_right"),
        Electrode(HalfSlab(-w / 2, yb, t, "left", ext), "control", 1, name="ctl_bottom_left"),
    ]


def _build_three_layer(p):
    # slot width w = 2d in every layer; gamma is the width/height ratio of
    # the open gap region, height measured between the inner faces of the
    # top and bottom layers
    d, t = p.d, p.thickness * p.d
    w = 2 * d
    s = w / p.gamma / 2 + t / 2
    if s - t / 2 <= t / 2:
        raise GeometryError(f"three_layer: gap height {w / p.gamma:g} m leaves no room for the middle layer")
    ext = p.slab_extent * d
    mid_role, out_role = ("rf", "control") if p.three_layer_rf == "middle" else ("control", "rf")
    electrodes = []
    ctl = 0
    for name, y, role in [("top", s, out_role), ("mid", 0.0, mid_role), ("bottom", -s, out_role)]:
        for side, edge, direction in [("left", -w / 2, "left"), ("right", w / 2, "right")]:
            if role == "control":
                electrodes.append(Electrode(HalfSlab(edge, y, t, direction, ext), "control",
                                            ctl, name=f"ctl_{name}_{side}"))
                ctl += 1
            else:
                electrodes.append(Electrode(HalfSlab(edge, y, t, direction, ext), "rf",
                                            name=f"rf_{name}_{side}"))
    return electrodes


def _build_four_wire(p):
    # control, RF, control, RF from left (equal widths); the axis sits above
    # the inner control electrode, between the two RF rails
    t = p.thickness * p.d
    w = p.center_width
    gap = p.gap * w
    rects = _planar_strips([w] * 4, gap, 1.0)
    k = p.d / _four_wire_null_height(rects, gap)
    snap = _snapper(p)
    rects = _planar_strips([snap(w * k, even=True)] * 4, snap(gap * k), t)
    roles = [("control", 0, "ctl_left"), ("rf", None, "rf_inner"),
             ("control", 1, "ctl_inner"), ("rf", None, "rf_right")]
    return [Electrode(r, role, idx, name=name) for r, (role, idx, name) in zip(rects, roles)]


def _four_wire_null_height(rects, gap):
    """Height of the RF null above the zero-thickness four-wire pattern."""
    from scipy.optimize import fsolve

    rf = [(r.bounds()[0] - gap / 2, r.bounds()[1] + gap / 2) for r in (rects[1], rects[3])]

    def field(pt):
        x, y = pt
        ex = ey = 0.0
        for x0, x1 in rf:
            # strip at 1 V in an otherwise grounded plane
            ex += y / ((x1 - x) ** 2 + y * y) - y / ((x0 - x) ** 2 + y * y)
            ey += (x1 - x) / ((x1 - x) ** 2 + y * y) - (x0 - x) / ((x0 - x) ** 2 + y * y)
        return [ex, ey]

    x0, x1, _, _ = rects[2].bounds()
    (x, y), _, ier, _ = fsolve(field, [0.5 * (x0 + x1), x1 - x0], full_output=True, xtol=1e-13)
    if ier != 1 or y <= 0:
        raise GeometryError("four_wire: no RF null above the electrode plane")
    return y


def _build_five_wire(p):
    t = p.thickness * p.d
    a = p.center_width
    bl = p.rf_width_left if p.rf_width_left is not None else p.rf_width
    br = p.rf_width_right if p.rf_width_right is not None else p.rf_width
    gap = p.gap * a
    c = p.outer_width * a
    # scale from the symmetric pattern so the geometry shrinks/grows together
    # when one rail is widened and the other narrowed
    b = p.rf_width
    h = _strip_null_height([(a / 2 + gap / 2, a / 2 + gap + b + gap / 2)])
    k = p.d / h
    snap = _snapper(p)
    a, gap, c = snap(a * k, even=True), snap(gap * k), snap(c * k, even=True)
    bl, br = snap(bl * k, even=True), snap(br * k, even=True)
    xs = []
    x = -a / 2 - gap - bl - gap - c
    for w in (c, bl, a, br, c):
        xs.append((x, w))
        x += w + gap
    roles = [("control", 0, "ctl_outer_left"), ("rf", None, "rf_left"),
             ("control", 1, "ctl_center"), ("rf", None, "rf_right"),
             ("control", 2, "ctl_outer_right")]
    return [Electrode(Rectangle((x0 + w / 2, -t / 2), w, t), role, idx, name=name)
            for (x0, w), (role, idx, name) in zip(xs, roles)]


def _build_five_wire_in_plane(p):
    d, t = p.d, p.thickness * p.d
    b, g, c = p.in_plane_rf_width * d, p.in_plane_gap * d, p.in_plane_outer_width * d
    return [
        Electrode(Rectangle((-(d + b + g + c / 2), 0.0), c, t), "control", 0, name="ctl_left"),
        Electrode(Rectangle((-(d + b / 2), 0.0), b, t), "rf", name="rf_left"),
        Electrode(Rectangle((d + b / 2, 0.0), b, t), "rf", name="rf_right"),
        Electrode(Rectangle((d + b + g + c / 2, 0.0), c, t), "control", 1, name="ctl_right"),
    ]


# --------------------------------------------------------------------------
# geometry documents
#
# [trap]
# label = five_wire
# d = 5e-05m
#
# [electrode]
# name = rf_left
# role = rf            (or: ground, control 0, control 1, ...)
# shape = rectangle
# center = -1e-05m, -2.5e-06m
# width = 5e-05m
# height = 5e-06m

_SHAPE_KEYS = {
    "disc": ("center", "radius"),
    "rectangle": ("center", "width", "height"),
    "half_slab": ("edge", "y", "thickness", "direction", "extent"),
}


def serialize(g):
    lines = ["[trap]", f"label = {g.label}", f"d = {format_length(g.d)}"]
    for e in g.electrodes:
        role = f"control {e.index}" if e.role == "control" else e.role
        lines += ["", "[electrode]", f"name = {e.name}", f"role = {role}",
                  f"shape = {e.shape.kind}"]
        s = e.shape
        if isinstance(s, Disc):
            lines += [f"center = {format_length(s.center[0])}, {format_length(s.center[1])}",
                      f"radius = {format_length(s.radius)}"]
        elif isinstance(s, Rectangle):
            lines += [f"center = {format_length(s.center[0])}, {format_length(s.center[1])}",
                      f"width = {format_length(s.width)}",
                      f"height = {format_length(s.height)}"]
        else:
            lines += [f"edge = {format_length(s.edge)}", f"y = {format_length(s.y)}",
                      f"thickness = {format_length(s.thickness)}",
                      f"direction = {s.direction}",
                      f"extent = {format_length(s.extent)}"]
    return "\n".join(lines) + "\n"


def _length(value, lineno, key):
    try:
        return parse_quantity(value, "length")
    except UnitError as exc:
        raise GeometryError(f"line {lineno}: {key}: {exc}") from None


def parse_spec_file(text):
    """Parse a geometry document (see module comments for the format)."""
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in ("trap", "electrode"):
                raise GeometryError(f"line {lineno}: unknown section [{name}]")
            current = (name, {}, lineno)
            sections.append(current)
            continue
        if current is None:
            raise GeometryError(f"line {lineno}: key outside of a section")
        if "=" not in line:
            raise GeometryError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in current[1]:
            raise GeometryError(f"line {lineno}: duplicate key {key!r}")
        current[1][key] = (value, lineno)

    traps = [s for s in sections if s[0] == "trap"]
    if len(traps) != 1:
        raise GeometryError("document needs exactly one [trap] section")
    trap = traps[0][1]
    if "d" not in trap:
        raise GeometryError(f"line {traps[0][2]}: [trap] is missing 'd'")
    d = _length(trap["d"][0], trap["d"][1], "d")
    label = trap.get("label", ("", 0))[0]

    electrodes = []
    for _, kv, start in (s for s in sections if s[0] == "electrode"):
        electrodes.append(_parse_electrode(kv, start, len(electrodes)))
    return CrossSectionGeometry(tuple(electrodes), d, label)


def _parse_electrode(kv, start, count):
    def need(key):
        if key not in kv:
            raise GeometryError(f"line {start}: [electrode] is missing {key!r}")
        return kv[key]

    name = kv.get("name", (f"e{count}", start))[0]
    role_text, role_line = need("role")
    parts = role_text.split()
    if parts[0] == "control":
        if len(parts) != 2 or not parts[1].isdigit():
            raise GeometryError(f"line {role_line}: control role needs an index, e.g. 'control 0'")
        role, index = "control", int(parts[1])
    elif parts[0] in ("rf", "ground") and len(parts) == 1:
        role, index = parts[0], None
    else:
        raise GeometryError(f"line {role_line}: unknown role {role_text!r}")

    kind, kind_line = need("shape")
    if kind not in _SHAPE_KEYS:
        raise GeometryError(f"line {kind_line}: unknown shape {kind!r}")
    allowed = {"name", "role", "shape", *_SHAPE_KEYS[kind]}
    for key, (_, lineno) in kv.items():
        if key not in allowed:
            raise GeometryError(f"line {lineno}: unexpected key {key!r} for {kind}")

    def length(key):
        v, ln = need(key)
        return _length(v, ln, key)

    def point(key):
        v, ln = need(key)
        parts = [s.strip() for s in v.split(",")]
        if len(parts) != 2:
            raise GeometryError(f"line {ln}: {key} needs two comma-separated lengths")
        return (_length(parts[0], ln, key), _length(parts[1], ln, key))

    if kind == "disc":
        shape = Disc(point("center"), length("radius"))
    elif kind == "rectangle":
        shape = Rectangle(point("center"), length("width"), length("height"))
    else:
        direction, dline = need("direction")
        if direction not in ("left", "right"):
            raise GeometryError(f"line {dline}: direction must be 'left' or 'right'")
        shape = HalfSlab(length("edge"), length("y"), length("thickness"), direction,
                         length("extent"))
    try:
        return Electrode(shape, role, index, name=name)
    except GeometryError as exc:
        raise GeometryError(f"line {start}: {exc}") from None
