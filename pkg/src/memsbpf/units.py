"""Display-unit scaling. Internals are SI; these helpers only touch I/O."""

from __future__ import annotations

SCALE = {
    "m": 1.0,
    "um": 1e-6,
    "nm": 1e-9,
    "m2": 1.0,
    "um2": 1e-12,
    "F": 1.0,
    "pF": 1e-12,
    "fF": 1e-15,
    "Hz": 1.0,
    "kHz": 1e3,
    "MHz": 1e6,
    "Ohm": 1.0,
    "kOhm": 1e3,
    "V": 1.0,
    "A": 1.0,
    "nA": 1e-9,
    "Pa": 1.0,
    "GPa": 1e9,
    "N/m": 1.0,
}


def to_display(value: float, unit: str) -> float:
    return value / SCALE[unit]


def from_display(value: float, unit: str) -> float:
    return value * SCALE[unit]


def fmt(value: float, unit: str, digits: int = 6) -> str:
    """``fmt(7.67e-5, "um") -> '76.7 um'``."""
    return f"{to_display(value, unit):.{digits}g} {unit}"
