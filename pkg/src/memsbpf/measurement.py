"""Measured C-V curves and vibration spectra: loading, parasitic-capacitance
fit, and resonance-peak extraction."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import numpy as np

from memsbpf.electrostatics import CVCurve
from memsbpf.errors import (
    DataFormatError,
    NoOverlapError,
    NoPeakError,
    NonMonotonicError,
    UnitMismatchError,
)

HEADERS = {
    "cv": ("voltage_V", "capacitance_F"),
    "spectrum": ("frequency_Hz", "amplitude"),
}

BUNDLED = {
    "cv": "varactor_cv_measured.csv",
    "spectrum": "cantilever_80um_ldv.csv",
}


@dataclass(frozen=True)
class MeasuredCurve:
    kind: str
    x: np.ndarray
    y: np.ndarray
    x_unit: str
    y_unit: str
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in HEADERS:
            raise ValueError(f"kind must be one of {sorted(HEADERS)}")
        if len(self.x) != len(self.y):
            raise ValueError("x and y differ in length")
        if len(self.x) < 3:
            raise DataFormatError("a measured curve needs at least 3 points")
        if np.any(np.diff(self.x) <= 0):
            raise NonMonotonicError("x values must be strictly increasing")

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))


def _split_header(col: str) -> tuple[str, str]:
    name, _, unit = col.partition("_")
    return name, unit


def load_curve(path: str | Path, kind: str) -> MeasuredCurve:
    """Read a two-column CSV.

    Lines starting with ``#`` are comments; ``# key: value`` comments before
    the header are kept as metadata (``label``, ``amplitude_unit``, ...).
    The header must name the expected quantities in SI units.
    """
    if kind not in HEADERS:
        raise ValueError(f"kind must be one of {sorted(HEADERS)}")
    path = Path(path)
    meta: dict[str, str] = {}
    header = None
    xs, ys = [], []
    with path.open(encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip():
                continue
            if row[0].lstrip().startswith("#"):
                text = ",".join(row).lstrip()[1:].strip()
                key, sep, value = text.partition(":")
                if sep and header is None:
                    meta[key.strip()] = value.strip()
                continue
            cells = [c.strip() for c in row]
            if header is None:
                header = cells
                _check_header(header, kind, lineno)
                continue
            if len(cells) != 2:
                raise DataFormatError(f"expected 2 columns, got {len(cells)}", lineno)
            try:
                x, y = float(cells[0]), float(cells[1])
            except ValueError:
                raise DataFormatError(f"non-numeric value in {cells!r}", lineno) from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise DataFormatError("non-finite value", lineno)
            if xs and x <= xs[-1]:
                raise NonMonotonicError(f"x = {x!r} does not exceed previous {xs[-1]!r}", lineno)
            xs.append(x)
            ys.append(y)
    if header is None:
        raise DataFormatError(f"{path}: no header row")
    x_unit = _split_header(header[0])[1]
    y_unit = _split_header(header[1])[1] or meta.get("amplitude_unit", "")
    return MeasuredCurve(kind, np.array(xs), np.array(ys), x_unit, y_unit,
                         label=meta.get("label", path.stem), meta=meta)


def _check_header(header, kind, lineno):
    if len(header) != 2:
        raise DataFormatError(f"header must have 2 columns, got {header!r}", lineno)
    for got, want in zip(header, HEADERS[kind]):
        if got == want:
            continue
        got_name, got_unit = _split_header(got)
        want_name, want_unit = _split_header(want)
        if got_name == want_name:
            raise UnitMismatchError(f"column {got!r}: expected unit {want_unit or '(free)'!r}", lineno)
        raise DataFormatError(f"header {header!r} does not match {list(HEADERS[kind])!r}", lineno)


def bundled_dataset(kind: str) -> Path:
    """Path to the packaged reconstruction of the measured dataset."""
    ref = resources.files("memsbpf") / "data" / BUNDLED[kind]
    return Path(str(ref))


def extract_parasitic(measured: MeasuredCurve, model: CVCurve) -> float:
    """Least-squares constant C_par with measured ~ model + C_par.

    The model is linearly interpolated onto the measured voltages that fall
    inside its range; the optimum is the mean residual.
    """
    mv = np.asarray(model.voltages, dtype=float)
    mc = np.asarray(model.capacitances, dtype=float)
    if mv.size == 0:
        raise NoOverlapError("model curve is empty")
    sel = (measured.x >= mv[0]) & (measured.x <= mv[-1])
    if mv.size == 1:
        sel = measured.x == mv[0]
    if not np.any(sel):
        raise NoOverlapError(
            f"measured range {measured.x[0]:.4g}..{measured.x[-1]:.4g} V misses model "
            f"range {mv[0]:.4g}..{mv[-1]:.4g} V"
        )
    resid = measured.y[sel] - np.interp(measured.x[sel], mv, mc)
    return float(np.mean(resid))


class Peak(NamedTuple):
    f_peak: float
    amplitude: float
    Q_est: float | None


def find_resonance_peak(spectrum: MeasuredCurve) -> Peak:
    """Peak frequency by a parabola through the three samples around the
    maximum; Q from the width at peak/sqrt(2) when both crossings are
    inside the sweep."""
    f, a = spectrum.x, spectrum.y
    i = int(np.argmax(a))
    if i == 0 or i == len(a) - 1:
        raise NoPeakError("spectrum maximum lies on the sweep edge")
    y0, y1, y2 = a[i - 1], a[i], a[i + 1]
    curv = y0 - 2.0 * y1 + y2
    # nonuniform spacing handled by mapping to local coordinate
    h_lo, h_hi = f[i] - f[i - 1], f[i + 1] - f[i]
    if math.isclose(h_lo, h_hi, rel_tol=1e-9) and curv < 0:
        delta = 0.5 * (y0 - y2) / curv
        f_peak = f[i] + delta * h_lo
        amp = y1 - 0.25 * (y0 - y2) * delta
    else:
        coeffs = np.polyfit(f[i - 1:i + 2] - f[i], a[i - 1:i + 2], 2)
        if coeffs[0] < 0:
            off = -coeffs[1] / (2.0 * coeffs[0])
            f_peak = f[i] + off
            amp = float(np.polyval(coeffs, off))
        else:
            f_peak, amp = f[i], y1

    level = amp / math.sqrt(2.0)
    lo = i
    while lo > 0 and a[lo] >= level:
        lo -= 1
    hi = i
    while hi < len(a) - 1 and a[hi] >= level:
        hi += 1
    if a[lo] >= level or a[hi] >= level:
        return Peak(float(f_peak), float(amp), None)
    f_lo = np.interp(level, [a[lo], a[lo + 1]], [f[lo], f[lo + 1]])
    f_hi = np.interp(level, [a[hi], a[hi - 1]], [f[hi], f[hi - 1]])
    return Peak(float(f_peak), float(amp), float(f_peak / (f_hi - f_lo)))
