"""Regenerate the bundled measured-data reconstructions in src/memsbpf/data.

Only a few numbers from the measurements are known: the C-V endpoints
(1.92 pF at 0 V, 2.29 pF at 8 V) and the LDV first-mode peak of the 80 um
beam (441.2 kHz over a 0-1 MHz sweep). The curves between those anchors are
modelled, not traced, and the files say so in their headers.
"""

import math
from pathlib import Path

import numpy as np

DATA = Path(__file__).resolve().parents[1] / "src" / "memsbpf" / "data"


def plate_stretch(v, v_pi):
    """g / (g - x) for a linear-spring parallel plate at bias v."""
    # solve u (1 - u)^2 = (4/27) (v / v_pi)^2 for the stable root u <= 1/3
    target = 4.0 / 27.0 * (v / v_pi) ** 2
    lo, hi = 0.0, 1.0 / 3.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * (1 - mid) ** 2 < target:
            lo = mid
        else:
            hi = mid
    return 1.0 / (1.0 - lo)


def cv_dataset():
    c_start, c_stop, v_stop, v_pi = 1.92e-12, 2.29e-12, 8.0, 8.81
    volts = np.arange(0.0, v_stop + 1e-9, 0.5)
    s = np.array([plate_stretch(v, v_pi) for v in volts])
    s_end = plate_stretch(v_stop, v_pi)
    cap = c_start + (c_stop - c_start) * (s - 1.0) / (s_end - 1.0)
    lines = [
        "# label: PolyMUMPs varactor, measured C-V (LCR meter), reconstruction",
        "# source: endpoints 1.92 pF @ 0 V and 2.29 pF @ 8 V are reported values;",
        "#   intermediate points follow a linear-spring parallel-plate shape with",
        "#   pull-in at 8.81 V and are approximate (about +/-0.03 pF)",
        "voltage_V,capacitance_F",
    ]
    lines += [f"{v:.1f},{c:.4e}" for v, c in zip(volts, cap)]
    (DATA / "varactor_cv_measured.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def ldv_dataset():
    f_peak, q = 441.2e3, 30.0
    # amplitude maximum of a driven oscillator sits below its natural frequency
    f0 = f_peak / math.sqrt(1.0 - 1.0 / (2.0 * q * q))
    freqs = np.arange(1.25e3, 1.0e6 + 1.0, 1.25e3)
    r = freqs / f0
    amp = 250.0 / np.sqrt((1 - r**2) ** 2 + (r / q) ** 2)  # pm, 250 pm static
    rng = np.random.default_rng(20101)
    amp = amp + rng.normal(0.0, 3.0, size=amp.size).clip(-9.0, 9.0) + 20.0
    lines = [
        "# label: LDV spectrum, 80 um cantilever, reconstruction",
        "# amplitude_unit: pm",
        "# source: first-mode peak at 441.2 kHz in a 0-1 MHz sweep is the reported",
        "#   value; line shape (driven oscillator, Q = 30), noise floor and",
        "#   amplitude scale are modelled",
        "frequency_Hz,amplitude",
    ]
    lines += [f"{f:.1f},{a:.4g}" for f, a in zip(freqs, amp)]
    (DATA / "cantilever_80um_ldv.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    cv_dataset()
    ldv_dataset()
