import math

import pytest
from hypothesis import given, strategies as st
from scipy import constants

from surftrap.units import UnitError, format_length, parse_quantity


@pytest.mark.parametrize("text, dim, value", [
    ("50um", "length", 50e-6),
    ("100MHz", "frequency", 100e6),
    ("9u", "mass", 9 * constants.atomic_mass),
    ("100V", "voltage", 100.0),
    ("3pF", "capacitance", 3e-12),
    ("1kohm", "resistance", 1e3),
    ("1e6V/m", "field", 1e6),
    ("1e", "charge", constants.e),
])
def test_parse_examples(text, dim, value):
    assert parse_quantity(text, dim) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text", ["100", "", "um", "5 parsecs"])
def test_bare_or_unknown_rejected(text):
    with pytest.raises(UnitError):
        parse_quantity(text)


def test_dimension_mismatch():
    with pytest.raises(UnitError, match="expected a length"):
        parse_quantity("100MHz", "length")


@given(st.floats(min_value=1e-12, max_value=1e3, allow_nan=False))
def test_length_round_trip(x):
    assert parse_quantity(format_length(x), "length") == x


def test_nonfinite_length():
    with pytest.raises(UnitError):
        format_length(math.inf)
