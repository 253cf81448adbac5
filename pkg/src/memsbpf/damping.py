"""Squeeze-film quality factor of a beam over its electrodes, and the
inverse problem of picking a width for a target Q."""

from __future__ import annotations

import math

from memsbpf.beam import CantileverBeam, natural_frequency
from memsbpf.materials import AIR, POLYSILICON, Ambient, Material


def squeeze_film_q(beam: CantileverBeam, f: float | None = None, ambient: Ambient = AIR) -> float:
    """Q = 2 pi rho h y0^3 f / (mu b^2), rigid-plate squeeze film.

    ``f`` defaults to the beam's own mode-1 frequency.
    """
    if f is None:
        f = natural_frequency(beam, 1)
    if not f > 0:
        raise ValueError("f must be > 0")
    rho = beam.material.density
    return 2.0 * math.pi * rho * beam.thickness * beam.gap**3 * f / (ambient.dynamic_viscosity * beam.width**2)


def synthesize_width(q_target: float, thickness: float, gap: float, f: float,
                     material: Material = POLYSILICON, ambient: Ambient = AIR) -> float:
    if not q_target > 0:
        raise ValueError("q_target must be > 0")
    if not f > 0:
        raise ValueError("f must be > 0")
    num = 2.0 * math.pi * material.density * thickness * gap**3 * f
    return math.sqrt(num / (ambient.dynamic_viscosity * q_target))
