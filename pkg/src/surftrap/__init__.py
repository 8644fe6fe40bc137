"""Electrostatics and pseudopotential analysis of linear RF ion traps."""

__version__ = "0.1.0"
