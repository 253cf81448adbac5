"""Design and analysis of MEMS band-pass filters.

Two filter families are covered: an RC network built from an electrostatic
parallel-plate varactor and a serpentine polysilicon resistor, and an
electrostatically driven cantilever resonator.
"""

from memsbpf.materials import (
    EPS0,
    Ambient,
    Material,
    default_material,
    load_registry,
    parse_registry,
    register_material,
    reset_registry,
)
from memsbpf.electrostatics import (
    CVCurve,
    PlateActuator,
    cv_curve,
    equilibrium_gap,
    overlap_capacitance,
    pull_in_voltage,
    suspension_stiffness,
    table1_actuator,
)
from memsbpf.beam import (
    CantileverBeam,
    LumpedBeam,
    ModalResult,
    fd_modal_oracle,
    lumped_params,
    modal_analysis,
    mode_constants,
    mode_shape,
    natural_frequency,
    synthesize_length,
)
from memsbpf.damping import squeeze_film_q, synthesize_width
from memsbpf.filters import (
    OutputCapacitance,
    RCFilter,
    ResonatorDrive,
    ResponseCurve,
    half_power_analysis,
    rc_center_frequency,
    rc_response,
    rc_response_curve,
    resonator_bandpass_curve,
    resonator_response,
    serpentine_resistance,
    synthesize_resistance,
)
from memsbpf.measurement import (
    MeasuredCurve,
    bundled_dataset,
    extract_parasitic,
    find_resonance_peak,
    load_curve,
)
from memsbpf.design import (
    ComparisonReport,
    DesignSpec,
    compare,
    footprint_area,
    synthesize_design,
    tunability,
)

__version__ = "0.1.0"
