"""Run configuration files.

INI-style ``key = value`` text, parsed completely before any computation::

    [material.polysilicon]      # any registry section, see materials
    youngs_modulus = 169e9

    [varactor]                  # PlateActuator fields over the table1 preset
    fringing_factor = 1.2716

    [beam]                      # length, width, thickness, gap, material
    length = 76.7e-6

    [sweep]
    op = beam-f1
    spring_model = cantilever
    axis.length = 50e-6, 100e-6, 6

    [output]
    path = out.csv
    format = csv

Unknown sections or keys raise :class:`ConfigError`.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from memsbpf.electrostatics import SPRING_MODELS, PlateActuator
from memsbpf.errors import ConfigError
from memsbpf.materials import Ambient, Material, parse_registry

BEAM_KEYS = ("length", "width", "thickness", "gap")
VARACTOR_KEYS = tuple(f.name for f in fields(PlateActuator) if f.name != "material")
INT_KEYS = ("beam_count", "hole_count")
OUTPUT_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    steps: int

    def values(self) -> list[float]:
        # same grid as np.linspace so sweeps line up with cv_curve
        return np.linspace(self.start, self.stop, self.steps).tolist()


@dataclass
class RunConfig:
    materials: list[Material | Ambient] = field(default_factory=list)
    varactor: dict[str, float] = field(default_factory=dict)
    beam: dict[str, float | str] = field(default_factory=dict)
    sweep_op: str | None = None
    spring_model: str = "fixed-guided"
    axes: list[Axis] = field(default_factory=list)
    output_path: str | None = None
    output_format: str | None = None


def parse_axis(name: str, text: str) -> Axis:
    """``"50e-6, 100e-6, 6"`` -> Axis(name, 5e-05, 1e-04, 6)."""
    parts = [p.strip() for p in text.replace(":", ",").split(",") if p.strip()]
    if len(parts) != 3:
        raise ConfigError(f"axis {name!r}: expected 'start, stop, steps', got {text!r}")
    try:
        start, stop = float(parts[0]), float(parts[1])
        steps = int(parts[2])
    except ValueError:
        raise ConfigError(f"axis {name!r}: cannot parse {text!r}") from None
    if steps < 1:
        raise ConfigError(f"axis {name!r} is empty (steps = {steps})")
    if steps > 1 and not stop > start:
        raise ConfigError(f"axis {name!r}: stop must exceed start")
    return Axis(name, start, stop, steps)


def _number(section, key, raw):
    try:
        return int(raw) if key in INT_KEYS else float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from None


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None

    cfg = RunConfig()
    registry_text = []
    for section in cp.sections():
        items = dict(cp.items(section))
        if section.startswith("material."):
            body = "\n".join(f"{k} = {v}" for k, v in items.items())
            registry_text.append(f"[{section.split('.', 1)[1]}]\n{body}")
        elif section == "varactor":
            for key, raw in items.items():
                if key not in VARACTOR_KEYS:
                    raise ConfigError(f"{source}: [varactor] unknown key {key!r}")
                cfg.varactor[key] = _number(section, key, raw)
        elif section == "beam":
            for key, raw in items.items():
                if key == "material":
                    cfg.beam[key] = raw
                elif key in BEAM_KEYS:
                    cfg.beam[key] = _number(section, key, raw)
                else:
                    raise ConfigError(f"{source}: [beam] unknown key {key!r}")
        elif section == "sweep":
            for key, raw in items.items():
                if key == "op":
                    cfg.sweep_op = raw
                elif key == "spring_model":
                    if raw not in SPRING_MODELS:
                        raise ConfigError(f"{source}: [sweep] spring_model must be one of {SPRING_MODELS}")
                    cfg.spring_model = raw
                elif key.startswith("axis."):
                    cfg.axes.append(parse_axis(key[5:], raw))
                else:
                    raise ConfigError(f"{source}: [sweep] unknown key {key!r}")
        elif section == "output":
            for key, raw in items.items():
                if key == "path":
                    cfg.output_path = raw
                elif key == "format":
                    if raw not in OUTPUT_FORMATS:
                        raise ConfigError(f"{source}: [output] format must be one of {OUTPUT_FORMATS}")
                    cfg.output_format = raw
                else:
                    raise ConfigError(f"{source}: [output] unknown key {key!r}")
        else:
            raise ConfigError(f"{source}: unknown section [{section}]")
    if registry_text:
        cfg.materials = parse_registry("\n".join(registry_text), source)
    return cfg


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, str(path))
