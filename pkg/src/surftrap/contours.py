"""Equal-value contour extraction from gridded fields (marching squares)."""

import csv
import io
import json
from dataclasses import dataclass

import numpy as np
from skimage import measure


class ContourError(ValueError):
    pass


@dataclass
class ContourSet:
    levels: np.ndarray
    lines: list  # (level index, (n, 2) array of x, y in meters)
    policy: dict

    @property
    def segment_count(self):
        return sum(len(p) - 1 for _, p in self.lines)

    def to_csv(self, meta=None):
        buf = io.StringIO()
        head = {"policy": self.policy, "levels": self.levels.tolist()} | (meta or {})
        buf.write("# " + json.dumps(head, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["level_index", "level", "line", "x_m", "y_m"])
        for k, (li, pts) in enumerate(self.lines):
            for x, y in pts:
                w.writerow([li, repr(float(self.levels[li])), k, repr(float(x)), repr(float(y))])
        return buf.getvalue()


def contour_levels(values, count=12, cap=None, floor_fraction=1e-3):
    """Geometrically spaced levels from just above the minimum to ``cap``.

    ``cap`` defaults to the median of the finite values, mirroring the
    usual practice of hiding contours above an arbitrary maximum.
    """
    v = np.asarray(values, float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        raise ContourError("empty field")
    lo, hi = float(v.min()), float(np.median(v) if cap is None else cap)
    if hi <= lo:
        return np.array([])
    span = hi - lo
    return lo + np.geomspace(floor_fraction * span, span, count)


def export_contours(field, grid, levels=None, count=12, cap=None, mask=None):
    """Contours of ``field`` on ``grid``; masked nodes (electrodes) are excluded.

    ``levels`` overrides the geometric policy.  A constant field gives no
    contours.
    """
    arr = np.array(field, float)
    if arr.size == 0 or arr.shape != grid.shape:
        raise ContourError("field is empty or does not match the grid")
    if mask is not None:
        arr[np.asarray(mask, bool)] = np.nan
    finite = np.isfinite(arr)
    if not finite.any():
        raise ContourError("field has no finite values")
    if levels is None:
        levels = contour_levels(arr, count, cap)
        policy = {"kind": "geometric", "count": count, "cap": cap if cap is not None else "median"}
    else:
        levels = np.sort(np.asarray(levels, float))
        policy = {"kind": "explicit", "count": len(levels)}
    lines = []
    fill = np.nanmax(arr) + 1.0
    work = np.where(finite, arr, fill)
    for li, lev in enumerate(levels):
        for c in measure.find_contours(work, lev, mask=finite):
            pts = np.column_stack([grid.origin[0] + grid.h * c[:, 0],
                                   grid.origin[1] + grid.h * c[:, 1]])
            if len(pts) > 1:
                lines.append((li, pts))
    return ContourSet(np.asarray(levels), lines, policy)
