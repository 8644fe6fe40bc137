"""Unit-suffixed quantity parsing (``50um``, ``100MHz``, ``9u``) into SI."""

import math
import re

from scipy import constants

_PREFIX = {"": 1.0, "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "m": 1e-3,
           "k": 1e3, "M": 1e6, "G": 1e9}

# unit symbol -> (dimension, SI factor)
_UNITS = {
    "m": ("length", 1.0),
    "V": ("voltage", 1.0),
    "Hz": ("frequency", 1.0),
    "s": ("time", 1.0),
    "F": ("capacitance", 1.0),
    "ohm": ("resistance", 1.0),
    "Ohm": ("resistance", 1.0),
    "W": ("power", 1.0),
    "e": ("charge", constants.e),
    "C": ("charge", 1.0),
    "kg": ("mass", 1.0),
    "u": ("mass", constants.atomic_mass),
    "V/m": ("field", 1.0),
}

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_RE = re.compile(rf"^\s*({_NUMBER})\s*([A-Za-zµ/]+)\s*$")


class UnitError(ValueError):
    pass


def _split_unit(symbol):
    if symbol in _UNITS:
        return _UNITS[symbol]
    for unit in sorted(_UNITS, key=len, reverse=True):
        if symbol.endswith(unit) and symbol[: -len(unit)] in _PREFIX:
            dim, factor = _UNITS[unit]
            if dim in ("mass", "charge") and unit in ("u", "e"):
                continue
            return dim, factor * _PREFIX[symbol[: -len(unit)]]
    raise UnitError(f"unknown unit {symbol!r}")


def parse_quantity(text, dimension=None):
    """Parse ``'<number><unit>'`` into an SI float.

    Bare numbers are rejected.  If ``dimension`` is given the unit must
    match it (``'length'``, ``'frequency'``, ``'mass'``, ...).
    """
    match = _RE.match(str(text))
    if not match:
        raise UnitError(f"expected <number><unit>, got {text!r}")
    value, symbol = float(match.group(1)), match.group(2)
    dim, factor = _split_unit(symbol)
    if dimension is not None and dim != dimension:
        raise UnitError(f"{text!r} is a {dim}, expected a {dimension}")
    return value * factor


def format_length(meters):
    """Shortest round-trip decimal in meters, e.g. ``5e-05m``."""
    if not math.isfinite(meters):
        raise UnitError(f"non-finite length {meters!r}")
    return f"{float(meters)!r}m"
