"""Parallel-plate varactor: capacitance, suspension stiffness, static
equilibrium, C-V sweeps and pull-in."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from memsbpf.errors import GeometryError
from memsbpf.materials import EPS0, POLYSILICON, Material

SPRING_MODELS = ("fixed-guided", "cantilever")

# Bisection tolerances; both searches run well past these bounds. The
# continuation tolerance is relative and far below 1 mV because the
# equilibrium displacement near the fold moves with sqrt(V_pi - V): a 1 mV
# bracket would leave x about 1.6 % short of g/3.
GAP_TOL = 1e-12  # m, absolute
VOLTAGE_RTOL = 1e-12


@dataclass(frozen=True)
class PlateActuator:
    electrode_length: float
    electrode_width: float
    proof_mass_length: float
    proof_mass_width: float
    proof_mass_thickness: float
    gap0: float
    beam_length: float
    beam_width: float
    beam_thickness: float
    beam_count: int = 4
    hole_side: float = 0.0
    hole_count: int = 0
    fringing_factor: float = 1.0
    material: Material = POLYSILICON

    def __post_init__(self):
        lengths = (
            "electrode_length", "electrode_width", "proof_mass_length", "proof_mass_width",
            "proof_mass_thickness", "gap0", "beam_length", "beam_width", "beam_thickness",
        )
        for name in lengths:
            if not getattr(self, name) > 0:
                raise GeometryError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.beam_count < 1:
            raise GeometryError("beam_count must be >= 1")
        if self.hole_count < 0 or self.hole_side < 0:
            raise GeometryError("hole_count and hole_side must be >= 0")
        if self.fringing_factor < 1.0:
            raise GeometryError("fringing_factor must be >= 1")
        if self.hole_area >= self.overlap_area:
            raise GeometryError("total hole area exceeds plate overlap area")

    @property
    def overlap_area(self) -> float:
        return min(self.electrode_length * self.electrode_width,
                   self.proof_mass_length * self.proof_mass_width)

    @property
    def hole_area(self) -> float:
        return self.hole_count * self.hole_side**2

    @property
    def effective_area(self) -> float:
        """Area entering the capacitance: overlap minus perforations, times
        the fringing factor."""
        return self.fringing_factor * (self.overlap_area - self.hole_area)

    def with_(self, **changes) -> PlateActuator:
        return replace(self, **changes)


def table1_actuator(fringing_factor: float = 1.0, material: Material = POLYSILICON) -> PlateActuator:
    """The fabricated PolyMUMPs varactor: Poly0 electrode under a perforated
    Poly1 proof mass on four suspension beams, 2 um air gap."""
    return PlateActuator(
        electrode_length=320e-6,
        electrode_width=220e-6,
        proof_mass_length=340e-6,
        proof_mass_width=240e-6,
        proof_mass_thickness=2e-6,
        gap0=2e-6,
        beam_length=100e-6,
        beam_width=20e-6,
        beam_thickness=2e-6,
        beam_count=4,
        hole_side=4e-6,
        hole_count=100,
        fringing_factor=fringing_factor,
        material=material,
    )


def overlap_capacitance(a: PlateActuator, gap: float) -> float:
    if not gap > 0:
        raise GeometryError(f"gap must be > 0, got {gap}")
    return EPS0 * a.effective_area / gap


def suspension_stiffness(a: PlateActuator, model: str = "fixed-guided") -> float:
    """Total out-of-plane stiffness of the suspension beams in N/m.

    ``fixed-guided`` uses 12EI/L^3 per beam (proof mass end stays parallel),
    ``cantilever`` uses 3EI/L^3 (free end).
    """
    inertia = a.beam_width * a.beam_thickness**3 / 12.0
    per_beam = a.material.youngs_modulus * inertia / a.beam_length**3
    if model == "fixed-guided":
        per_beam *= 12.0
    elif model == "cantilever":
        per_beam *= 3.0
    else:
        raise ValueError(f"unknown spring model {model!r}; expected one of {SPRING_MODELS}")
    return a.beam_count * per_beam


def _residual(a: PlateActuator, k: float, voltage: float, x: float) -> float:
    return k * x - EPS0 * a.effective_area * voltage**2 / (2.0 * (a.gap0 - x) ** 2)


def equilibrium_displacement(a: PlateActuator, k: float, voltage: float) -> float | None:
    """Stable plate displacement toward the electrode, or None past pull-in.

    On [0, g/3] the force-balance residual is increasing whenever a stable
    root exists, so the root is unique there and bisection finds it.
    """
    if voltage < 0:
        raise ValueError("voltage must be >= 0")
    if voltage == 0:
        return 0.0
    g = a.gap0
    hi = g / 3.0
    if _residual(a, k, voltage, hi) < 0:
        return None
    lo = 0.0
    # run to float resolution; the residual bound 1e-12*k*g needs far less
    # than GAP_TOL of displacement error
    while True:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if _residual(a, k, voltage, mid) < 0:
            lo = mid
        else:
            hi = mid
    r_lo = abs(_residual(a, k, voltage, lo))
    r_hi = abs(_residual(a, k, voltage, hi))
    return lo if r_lo <= r_hi else hi


def equilibrium_gap(a: PlateActuator, k: float, voltage: float) -> float | None:
    """Gap at stable equilibrium; None means the plate has pulled in."""
    x = equilibrium_displacement(a, k, voltage)
    return None if x is None else a.gap0 - x


def _pull_in_analytic(a: PlateActuator, k: float) -> float:
    return math.sqrt(8.0 * k * a.gap0**3 / (27.0 * EPS0 * a.effective_area))


def _pull_in_bracket(a: PlateActuator, k: float) -> tuple[float, float]:
    # march upward with a growing step until the solver reports pull-in
    lo, step = 0.0, 1e-2
    while True:
        v = lo + step
        if equilibrium_displacement(a, k, v) is None:
            return lo, v
        lo = v
        step *= 2.0


def pull_in_voltage(a: PlateActuator, k: float, method: str = "analytic") -> float:
    """Pull-in voltage by closed form or by continuation on the equilibrium
    solver followed by bisection."""
    if not k > 0:
        raise ValueError("k must be > 0")
    if method == "analytic":
        return _pull_in_analytic(a, k)
    if method != "continuation":
        raise ValueError(f"unknown pull-in method {method!r}")
    lo, hi = _pull_in_bracket(a, k)
    while hi - lo > VOLTAGE_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if equilibrium_displacement(a, k, mid) is None:
            hi = mid
        else:
            lo = mid
    return lo


def pull_in_edge(a: PlateActuator, k: float) -> tuple[float, float]:
    """Largest stable voltage found by continuation and its displacement."""
    v = pull_in_voltage(a, k, method="continuation")
    x = equilibrium_displacement(a, k, v)
    return v, x


@dataclass(frozen=True)
class CVCurve:
    """Capacitance against bias up to pull-in.

    ``pull_in_capacitance`` is the capacitance at the last stable bias just
    below pull-in, which the regular voltage grid usually does not hit.
    """

    voltages: tuple[float, ...]
    capacitances: tuple[float, ...]
    pull_in_voltage: float | None = None
    pull_in_capacitance: float | None = None
    spring_model: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.voltages) != len(self.capacitances):
            raise ValueError("voltages and capacitances differ in length")
        if any(b <= a for a, b in zip(self.voltages, self.voltages[1:])):
            raise ValueError("voltages must be strictly increasing")

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.voltages, self.capacitances))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["voltage_V", "capacitance_F"])
        for v, c in self.points:
            w.writerow([repr(v), repr(c)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "spring_model": self.spring_model,
                "pull_in_voltage": self.pull_in_voltage,
                "pull_in_capacitance": self.pull_in_capacitance,
                "points": [{"voltage_V": v, "capacitance_F": c} for v, c in self.points],
                **({"meta": self.meta} if self.meta else {}),
            },
            indent=2,
        ) + "\n"

    @classmethod
    def from_json(cls, text: str) -> CVCurve:
        d = json.loads(text)
        pts = d["points"]
        return cls(
            voltages=tuple(p["voltage_V"] for p in pts),
            capacitances=tuple(p["capacitance_F"] for p in pts),
            pull_in_voltage=d.get("pull_in_voltage"),
            pull_in_capacitance=d.get("pull_in_capacitance"),
            spring_model=d.get("spring_model", ""),
            meta=d.get("meta", {}),
        )


def cv_curve(a: PlateActuator, k: float, v_start: float, v_stop: float, steps: int,
             spring_model: str = "") -> CVCurve:
    """Sweep bias on a uniform grid; stop at the first pulled-in point."""
    if not 0 <= v_start < v_stop:
        raise ValueError("need 0 <= v_start < v_stop")
    if steps < 2:
        raise ValueError("steps must be >= 2")
    vs, cs = [], []
    pulled_in = False
    for v in np.linspace(v_start, v_stop, steps):
        gap = equilibrium_gap(a, k, float(v))
        if gap is None:
            pulled_in = True
            break
        vs.append(float(v))
        cs.append(overlap_capacitance(a, gap))
    v_pi = c_pi = None
    if pulled_in:
        v_pi, x_pi = pull_in_edge(a, k)
        c_pi = overlap_capacitance(a, a.gap0 - x_pi)
    return CVCurve(tuple(vs), tuple(cs), v_pi, c_pi, spring_model)
