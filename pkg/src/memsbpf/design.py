"""End-to-end synthesis of both filter designs and their side-by-side
comparison (Q, tunability, footprint)."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

from memsbpf.beam import CantileverBeam, LumpedBeam, lumped_params, natural_frequency, synthesize_length
from memsbpf.damping import squeeze_film_q, synthesize_width
from memsbpf.electrostatics import (
    CVCurve,
    PlateActuator,
    cv_curve,
    overlap_capacitance,
    pull_in_voltage,
    suspension_stiffness,
    table1_actuator,
)
from memsbpf.errors import NoPullInError
from memsbpf.filters import (
    HalfPower,
    RCFilter,
    ResonatorDrive,
    SerpentineResistor,
    half_power_analysis,
    rc_center_frequency,
    rc_response_curve,
    resonator_bandpass_curve,
    size_serpentine,
    synthesize_resistance,
)
from memsbpf.materials import AIR, EPS0, POLYSILICON, Ambient, Material

TOPOLOGIES = ("rc", "resonator")
FIXED_F0_NOTE = (
    "f0 = 1/(2 pi R C): a +50 % capacitance swing lowers f0 by 33.3 %, "
    "so a 50 % capacitance range is not a 50 % centre-frequency range"
)


@dataclass(frozen=True)
class DesignSpec:
    f0_target: float
    topology: str
    Q_target: float | None = None

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"topology must be one of {TOPOLOGIES}")
        if not self.f0_target > 0:
            raise ValueError("f0_target must be > 0")
        if self.topology == "resonator" and not (self.Q_target and self.Q_target > 0):
            raise ValueError("resonator designs need Q_target > 0")


@dataclass(frozen=True)
class RCDesign:
    spec: DesignSpec
    actuator: PlateActuator
    spring_model: str
    k: float
    capacitance: float
    filter: RCFilter
    resistor: SerpentineResistor
    cv: CVCurve
    analysis: HalfPower


@dataclass(frozen=True)
class ResonatorDesign:
    spec: DesignSpec
    beam: CantileverBeam
    lumped: LumpedBeam
    Q: float
    drive: ResonatorDrive
    electrode_length: float
    electrode_width: float
    f1: float
    analysis: HalfPower


class Tunability(NamedTuple):
    dC_over_C: float
    df0_over_f0: float


def tunability(cv: CVCurve) -> Tunability:
    """Capacitance swing from 0 V to just below pull-in and the resulting
    relative shift of f0 = 1/(2 pi R C) at fixed R."""
    if cv.pull_in_voltage is None or cv.pull_in_capacitance is None:
        raise NoPullInError("C-V curve does not reach pull-in; extend v_stop")
    dc = cv.pull_in_capacitance / cv.capacitances[0] - 1.0
    return Tunability(dc, 1.0 / (1.0 + dc) - 1.0)


def resonator_tuning(design: ResonatorDesign) -> float:
    """Relative f1 shift from electrostatic spring softening at the design
    bias, sqrt(1 - k_e/k_eff) - 1 with k_e = eps0 A V_p^2 / y0^3."""
    k_e = EPS0 * design.drive.electrode_overlap_area * design.drive.V_p**2 / design.beam.gap**3
    ratio = k_e / design.lumped.k_eff
    if ratio >= 1.0:
        return -1.0
    return math.sqrt(1.0 - ratio) - 1.0


def synthesize_design(
    spec: DesignSpec,
    *,
    actuator: PlateActuator | None = None,
    spring_model: str = "fixed-guided",
    capacitance: float | None = None,
    cv_stop: float | None = None,
    sheet_resistance: float = 30.0,
    resistor_width: float = 2e-6,
    resistor_spacing: float = 2e-6,
    segment_length: float = 300e-6,
    thickness: float = 2e-6,
    gap: float = 2e-6,
    material: Material = POLYSILICON,
    ambient: Ambient = AIR,
    V_p: float = 10.0,
    v_i: float = 0.1,
    electrode_fraction: float = 0.5,
    electrode_width: float | None = None,
) -> RCDesign | ResonatorDesign:
    """Size a filter for ``spec``.

    RC: the varactor (the table1 preset unless ``actuator`` is given) sets C
    at 0 V. A ``capacitance`` override rescales the fringing factor so the
    C-V model starts there (only upward; the factor stays >= 1). R follows
    from f0 and is laid out as a serpentine.

    Resonator: length from f0, width from Q, output electrode under the
    last ``electrode_fraction`` of the beam.
    """
    if spec.topology == "rc":
        a = actuator or table1_actuator(material=material)
        c0 = overlap_capacitance(a, a.gap0)
        if capacitance is not None:
            # calibrate the fringing factor so the C-V model starts at C
            scale = capacitance / c0
            if scale >= 1.0 / a.fringing_factor:
                a = a.with_(fringing_factor=max(1.0, a.fringing_factor * scale))
            c0 = capacitance
        k = suspension_stiffness(a, spring_model)
        r = synthesize_resistance(spec.f0_target, c0)
        filt = RCFilter(r, c0)
        v_pi = pull_in_voltage(a, k)
        cv = cv_curve(a, k, 0.0, cv_stop or 1.2 * v_pi, 241, spring_model=spring_model)
        analysis = half_power_analysis(rc_response_curve(filt))
        return RCDesign(spec, a, spring_model, k, c0, filt,
                        size_serpentine(r, sheet_resistance, resistor_width, resistor_spacing, segment_length),
                        cv, analysis)

    length = synthesize_length(spec.f0_target, thickness, material)
    width = synthesize_width(spec.Q_target, thickness, gap, spec.f0_target, material, ambient)
    beam = CantileverBeam(length, width, thickness, gap, material)
    lumped = lumped_params(beam)
    q = squeeze_film_q(beam, None, ambient)
    e_len = electrode_fraction * length
    e_wid = width if electrode_width is None else electrode_width
    drive = ResonatorDrive(V_p, v_i, e_len * min(width, e_wid))
    analysis = half_power_analysis(resonator_bandpass_curve(beam, lumped, q, drive))
    return ResonatorDesign(spec, beam, lumped, q, drive, e_len, e_wid, natural_frequency(beam), analysis)


def footprint_area(design: RCDesign | ResonatorDesign) -> tuple[float, str]:
    """Bounding-box area and a description of what it counts."""
    if isinstance(design, RCDesign):
        a = design.actuator
        pm = a.proof_mass_length * a.proof_mass_width
        res = design.resistor.bbox_area
        return pm + res, "bounding boxes: varactor proof mass + serpentine resistor (anchors, pads excluded)"
    b = design.beam
    return b.length * max(b.width, design.electrode_width), \
        "bounding box: cantilever beam and the electrodes beneath it (anchor, pads excluded)"


@dataclass
class ComparisonReport:
    rc: dict
    resonator: dict
    ratios: dict
    checks: dict
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ComparisonReport:
        return cls(**json.loads(text))

    def to_text(self) -> str:
        rows = [
            ("centre frequency [kHz]", "f0_Hz", 1e-3, ".6g"),
            ("quality factor", "Q", 1.0, ".4g"),
            ("footprint [um^2]", "footprint_area_m2", 1e12, ".6g"),
            ("tunability df0/f0 [%]", "tunability", 100.0, ".3g"),
        ]
        lines = [f"{'':26s}{'RC (varactor)':>18s}{'resonator':>18s}"]
        for label, key, scale, spec in rows:
            cells = []
            for entry in (self.rc, self.resonator):
                v = entry.get(key)
                cells.append("n/a" if v is None else format(v * scale, spec))
            lines.append(f"{label:26s}{cells[0]:>18s}{cells[1]:>18s}")
        lines.append("")
        for name, ok in self.checks.items():
            lines.append(f"[{'x' if ok else ' '}] {name}")
        for entry in (self.rc, self.resonator):
            lines.append(f"{entry['topology']}: tunability basis: {entry['tunability_basis']}")
            lines.append(f"{entry['topology']}: footprint: {entry['footprint_method']}")
        lines.extend(f"note: {n}" for n in self.notes)
        return "\n".join(lines) + "\n"


def compare(rc: RCDesign, res: ResonatorDesign) -> ComparisonReport:
    rc_area, rc_method = footprint_area(rc)
    res_area, res_method = footprint_area(res)
    tune = tunability(rc.cv)
    res_tune = resonator_tuning(res)
    a = rc.actuator
    rc_entry = {
        "topology": "rc",
        "f0_Hz": rc.analysis.f_center,
        "f0_design_Hz": rc_center_frequency(rc.filter),
        "f_low_Hz": rc.analysis.f_low,
        "f_high_Hz": rc.analysis.f_high,
        "Q": rc.analysis.Q,
        "footprint_area_m2": rc_area,
        "footprint_method": rc_method,
        "tunability": abs(tune.df0_over_f0),
        "dC_over_C": tune.dC_over_C,
        "df0_over_f0": tune.df0_over_f0,
        "tunability_basis": "varactor bias 0 V to just below pull-in at fixed R",
        "key_dimensions": {
            "R_ohm": rc.filter.R,
            "C0_F": rc.capacitance,
            "spring_model": rc.spring_model,
            "k_N_per_m": rc.k,
            "pull_in_voltage_V": rc.cv.pull_in_voltage,
            "gap0_m": a.gap0,
            "proof_mass_m": [a.proof_mass_length, a.proof_mass_width, a.proof_mass_thickness],
            "resistor_segments": rc.resistor.n_segments,
            "resistor_segment_length_m": rc.resistor.segment_length,
            "resistor_width_m": rc.resistor.width,
            "sheet_resistance_ohm_sq": rc.resistor.sheet_resistance,
        },
    }
    b = res.beam
    res_entry = {
        "topology": "resonator",
        "f0_Hz": res.analysis.f_center,
        "f0_design_Hz": res.f1,
        "f_low_Hz": res.analysis.f_low,
        "f_high_Hz": res.analysis.f_high,
        "Q": res.analysis.Q,
        "footprint_area_m2": res_area,
        "footprint_method": res_method,
        "tunability": abs(res_tune),
        "dC_over_C": None,
        "df0_over_f0": res_tune,
        "tunability_basis": f"spring softening at V_p = {res.drive.V_p:g} V",
        "key_dimensions": {
            "length_m": b.length,
            "width_m": b.width,
            "thickness_m": b.thickness,
            "gap_m": b.gap,
            "Q_squeeze": res.Q,
            "k_eff_N_per_m": res.lumped.k_eff,
            "m_eff_kg": res.lumped.m_eff,
            "electrode_overlap_area_m2": res.drive.electrode_overlap_area,
        },
    }
    ratios = {
        "Q_resonator_over_rc": res_entry["Q"] / rc_entry["Q"],
        "area_rc_over_resonator": rc_area / res_area,
        "tunability_rc_over_resonator": (rc_entry["tunability"] / res_entry["tunability"]
                                         if res_entry["tunability"] > 0 else None),
    }
    checks = {
        "resonator Q >> RC Q (ratio > 10)": ratios["Q_resonator_over_rc"] > 10.0,
        "RC tunability > resonator tunability": rc_entry["tunability"] > res_entry["tunability"],
        "RC footprint > resonator footprint": rc_area > res_area,
    }
    notes = [FIXED_F0_NOTE, f"varactor spring model: {rc.spring_model}"]
    return ComparisonReport(rc_entry, res_entry, ratios, checks, notes)
