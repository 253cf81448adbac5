"""Frequency response of the two band-pass topologies.

RC network::

    H(s) = sRC / (s^2 R^2 C^2 + 3 sRC + 1),   f0 = 1 / (2 pi R C)

Resonator: a dc bias V_p on the beam and an ac drive v_i on the input
electrode give a force at the drive frequency; the tip motion modulates the
output capacitance C_o(t) = C_fix + C_var sin(wt) and the bias turns that
into a motional current i_o = V_p dC_o/dt.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from memsbpf.beam import CantileverBeam, LumpedBeam, natural_frequency
from memsbpf.errors import CutoffOutOfRangeError, GeometryError, NoPeakError
from memsbpf.materials import EPS0

DEFAULT_POINTS_PER_DECADE = 200
CORNER_SQUARES = 0.56


@dataclass(frozen=True)
class RCFilter:
    R: float
    C: float

    def __post_init__(self):
        if not (self.R > 0 and self.C > 0):
            raise ValueError(f"R and C must be > 0, got R={self.R}, C={self.C}")


def rc_response(f: RCFilter, freq):
    """Magnitude and phase (rad) of H(j 2 pi freq). Accepts arrays."""
    freq = np.asarray(freq, dtype=float)
    if np.any(freq <= 0):
        raise ValueError("freq must be > 0")
    src = 2j * np.pi * freq * f.R * f.C
    h = src / (src**2 + 3.0 * src + 1.0)
    mag, ph = np.abs(h), np.angle(h)
    if mag.ndim == 0:
        return float(mag), float(ph)
    return mag, ph


def rc_center_frequency(f: RCFilter) -> float:
    return 1.0 / (2.0 * math.pi * f.R * f.C)


def synthesize_resistance(f0: float, C: float) -> float:
    if not (f0 > 0 and C > 0):
        raise ValueError("f0 and C must be > 0")
    return 1.0 / (2.0 * math.pi * f0 * C)


def serpentine_resistance(segment_length: float, width: float, n_segments: int,
                          n_corners: int, sheet_resistance: float) -> float:
    """Sheet resistance times square count; each corner counts 0.56 squares."""
    if min(segment_length, width, sheet_resistance) <= 0 or n_segments < 1 or n_corners < 0:
        raise GeometryError("serpentine dimensions must be positive")
    squares = n_segments * segment_length / width + CORNER_SQUARES * n_corners
    return sheet_resistance * squares


@dataclass(frozen=True)
class SerpentineResistor:
    segment_length: float
    width: float
    spacing: float
    n_segments: int
    sheet_resistance: float

    @property
    def n_corners(self) -> int:
        return self.n_segments - 1

    @property
    def resistance(self) -> float:
        return serpentine_resistance(self.segment_length, self.width, self.n_segments,
                                     self.n_corners, self.sheet_resistance)

    @property
    def bbox_area(self) -> float:
        pitch = self.width + self.spacing
        return self.segment_length * (self.n_segments * pitch - self.spacing)


def size_serpentine(r_target: float, sheet_resistance: float = 30.0, width: float = 2e-6,
                    spacing: float = 2e-6, segment_length: float = 300e-6) -> SerpentineResistor:
    """Fewest equal-length segments reaching ``r_target``, then the last
    segment length trimmed so the resistance is exact."""
    if not r_target > 0:
        raise ValueError("r_target must be > 0")
    squares = r_target / sheet_resistance
    per_segment = segment_length / width + CORNER_SQUARES
    n = max(1, math.ceil((squares + CORNER_SQUARES) / per_segment))
    # exact fit with n segments of a common trimmed length
    trimmed = (squares - CORNER_SQUARES * (n - 1)) * width / n
    if trimmed <= 0:
        raise GeometryError("target resistance too small for one segment at this width")
    return SerpentineResistor(trimmed, width, spacing, n, sheet_resistance)


class HalfPower(NamedTuple):
    f_low: float
    f_high: float
    f_center: float
    Q: float


@dataclass(frozen=True)
class ResponseCurve:
    frequencies: np.ndarray
    magnitudes: np.ndarray
    phases: np.ndarray
    source: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        fr = np.asarray(self.frequencies, dtype=float)
        if fr.ndim != 1 or fr.size < 3:
            raise ValueError("a response curve needs at least 3 points")
        if np.any(np.diff(fr) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        if np.any(np.asarray(self.magnitudes) < 0):
            raise ValueError("magnitudes must be >= 0")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["frequency_Hz", "magnitude", "phase_rad"])
        for row in zip(self.frequencies.tolist(), self.magnitudes.tolist(), self.phases.tolist()):
            w.writerow([repr(v) for v in row])
        return buf.getvalue()

    def to_dict(self, analysis: HalfPower | None = None) -> dict:
        d = {"source": self.source}
        if self.meta:
            d["meta"] = self.meta
        if analysis is not None:
            d.update(analysis._asdict())
        d["points"] = [
            {"frequency_Hz": f, "magnitude": m, "phase_rad": p}
            for f, m, p in zip(self.frequencies.tolist(), self.magnitudes.tolist(), self.phases.tolist())
        ]
        return d

    def to_json(self, analysis: HalfPower | None = None) -> str:
        return json.dumps(self.to_dict(analysis), indent=2) + "\n"


def log_grid(f_start: float, f_stop: float, points_per_decade: int = DEFAULT_POINTS_PER_DECADE) -> np.ndarray:
    if not 0 < f_start < f_stop:
        raise ValueError("need 0 < f_start < f_stop")
    n = max(3, int(math.ceil(math.log10(f_stop / f_start) * points_per_decade)) + 1)
    return np.logspace(math.log10(f_start), math.log10(f_stop), n)


def rc_response_curve(f: RCFilter, freqs=None, points_per_decade: int = DEFAULT_POINTS_PER_DECADE) -> ResponseCurve:
    if freqs is None:
        f0 = rc_center_frequency(f)
        freqs = log_grid(f0 / 100.0, f0 * 100.0, points_per_decade)
    freqs = np.asarray(freqs, dtype=float)
    mag, ph = rc_response(f, freqs)
    return ResponseCurve(freqs, np.atleast_1d(mag), np.atleast_1d(ph), source=f"rc R={f.R!r} C={f.C!r}")


def _crossing(logf, logm, i, j, level):
    # linear in (log f, log |H|) between samples i and j
    t = (level - logm[i]) / (logm[j] - logm[i])
    return math.exp(logf[i] + t * (logf[j] - logf[i]))


def half_power_analysis(curve: ResponseCurve) -> HalfPower:
    """-3 dB cutoffs, centre frequency and Q = f_c / (f_high - f_low).

    The centre is the sample maximum refined by a parabola through its
    neighbours in (log f, log |H|); cutoffs are interpolated linearly in the
    same coordinates.
    """
    f = np.asarray(curve.frequencies, dtype=float)
    m = np.asarray(curve.magnitudes, dtype=float)
    i = int(np.argmax(m))
    if i == 0 or i == len(m) - 1 or m[i] <= 0:
        raise NoPeakError("response has no interior maximum")
    logf = np.log(f)
    with np.errstate(divide="ignore"):
        logm = np.log(m)
    level = logm[i] - 0.5 * math.log(2.0)

    lo = i
    while lo > 0 and logm[lo] >= level:
        lo -= 1
    if logm[lo] >= level:
        raise CutoffOutOfRangeError("lower -3 dB point lies below the frequency range")
    hi = i
    while hi < len(m) - 1 and logm[hi] >= level:
        hi += 1
    if logm[hi] >= level:
        raise CutoffOutOfRangeError("upper -3 dB point lies above the frequency range")
    f_low = _crossing(logf, logm, lo, lo + 1, level)
    f_high = _crossing(logf, logm, hi - 1, hi, level)

    x0, x1, x2 = logf[i - 1], logf[i], logf[i + 1]
    y0, y1, y2 = logm[i - 1], logm[i], logm[i + 1]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    xc = -b / (2.0 * a) if a < 0 else x1
    f_center = math.exp(min(max(xc, x0), x2))
    return HalfPower(f_low, f_high, f_center, f_center / (f_high - f_low))


@dataclass(frozen=True)
class ResonatorDrive:
    V_p: float
    v_i_amplitude: float
    electrode_overlap_area: float
    R_o: float | None = None  # termination, informational only

    def __post_init__(self):
        if self.V_p < 0 or self.v_i_amplitude < 0:
            raise ValueError("V_p and v_i_amplitude must be >= 0")
        if not self.electrode_overlap_area > 0:
            raise ValueError("electrode_overlap_area must be > 0")
        if self.v_i_amplitude > 0.1 * self.V_p:
            warnings.warn("v_i > 0.1 V_p: the small-signal force model is stretched", stacklevel=3)


@dataclass(frozen=True)
class OutputCapacitance:
    C_fix: float
    C_var: float
    omega: float

    def __post_init__(self):
        if not self.C_fix > 0 or self.C_var < 0:
            raise ValueError("need C_fix > 0 and C_var >= 0")

    def at(self, t):
        return self.C_fix + self.C_var * np.sin(self.omega * t)

    def motional_current(self, t, V_p: float):
        return V_p * self.C_var * self.omega * np.cos(self.omega * t)


class ResonatorPoint(NamedTuple):
    tip_displacement: np.ndarray | float
    C_var: np.ndarray | float
    i_out_amplitude: np.ndarray | float
    phase: np.ndarray | float


def motional_current_amplitude(V_p: float, C_var: float, freq: float) -> float:
    return V_p * C_var * 2.0 * math.pi * freq


def output_capacitance(beam: CantileverBeam, lumped: LumpedBeam, Q: float,
                       drive: ResonatorDrive, freq: float) -> OutputCapacitance:
    c_fix = EPS0 * drive.electrode_overlap_area / beam.gap
    c_var = float(resonator_response(beam, lumped, Q, drive, freq).C_var)
    return OutputCapacitance(c_fix, c_var, 2.0 * math.pi * freq)


def resonator_response(beam: CantileverBeam, lumped: LumpedBeam, Q: float,
                       drive: ResonatorDrive, freq) -> ResonatorPoint:
    """Small-signal response at ``freq`` (scalar or array).

    Only the V_p v_i cross term of the (V_p - v_i)^2 force is kept; the V_p^2
    term is a static offset.
    """
    freq = np.asarray(freq, dtype=float)
    if np.any(freq <= 0):
        raise ValueError("freq must be > 0")
    if not Q > 0:
        raise ValueError("Q must be > 0")
    eps_a = EPS0 * drive.electrode_overlap_area
    force = eps_a * drive.V_p * drive.v_i_amplitude / beam.gap**2
    w1 = 2.0 * math.pi * natural_frequency(beam, 1)
    w = 2.0 * math.pi * freq
    x = (force / lumped.m_eff) / np.sqrt((w1**2 - w**2) ** 2 + (w1 * w / Q) ** 2)
    c_var = eps_a * x / beam.gap**2
    i_out = drive.V_p * c_var * w
    phase = 0.5 * math.pi - np.arctan2(w1 * w / Q, w1**2 - w**2)
    if freq.ndim == 0:
        return ResonatorPoint(float(x), float(c_var), float(i_out), float(phase))
    return ResonatorPoint(x, c_var, i_out, phase)


def resonator_grid(f1: float, Q: float, span: float = 10.0) -> np.ndarray:
    """Log grid over f1/span..f1*span dense enough to resolve the -3 dB
    band (about 17 samples across it)."""
    ppd = max(DEFAULT_POINTS_PER_DECADE, int(math.ceil(40 * Q)))
    return log_grid(f1 / span, f1 * span, ppd)


def resonator_bandpass_curve(beam: CantileverBeam, lumped: LumpedBeam, Q: float,
                             drive: ResonatorDrive, freqs=None, normalize: bool = False) -> ResponseCurve:
    f1 = natural_frequency(beam, 1)
    if freqs is None:
        freqs = resonator_grid(f1, Q)
    freqs = np.asarray(freqs, dtype=float)
    if not freqs[0] < f1 < freqs[-1]:
        raise NoPeakError(f"grid {freqs[0]:.6g}..{freqs[-1]:.6g} Hz misses the resonance at {f1:.6g} Hz")
    pt = resonator_response(beam, lumped, Q, drive, freqs)
    mag = np.asarray(pt.i_out_amplitude)
    if normalize and mag.max() > 0:
        mag = mag / mag.max()
    return ResponseCurve(freqs, mag, np.asarray(pt.phase), source="resonator i_out",
                         meta={"f1_Hz": f1, "Q": Q, "normalized": normalize})
