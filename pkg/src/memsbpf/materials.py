"""Material and ambient constants, in SI units.

The polysilicon defaults (E = 160 GPa, rho = 2330 kg/m^3) are not measured
values. They were picked because a 2 um thick, 76.7 um long clamped-free beam
then resonates at 455 kHz, the IF design point. Override them through a
registry file when process data is available.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields
from pathlib import Path

from memsbpf.errors import ConfigError, UnknownMaterialError

EPS0 = 8.854187817e-12  # F/m; relative permittivity of air is taken as 1


@dataclass(frozen=True)
class Material:
    name: str
    youngs_modulus: float  # Pa
    density: float  # kg/m^3

    def __post_init__(self):
        if not (self.youngs_modulus > 0 and math.isfinite(self.youngs_modulus)):
            raise ValueError(f"youngs_modulus must be > 0, got {self.youngs_modulus}")
        if not (self.density > 0 and math.isfinite(self.density)):
            raise ValueError(f"density must be > 0, got {self.density}")

    @property
    def sound_speed(self) -> float:
        """sqrt(E/rho), the longitudinal bar wave speed in m/s."""
        return math.sqrt(self.youngs_modulus / self.density)


@dataclass(frozen=True)
class Ambient:
    name: str
    dynamic_viscosity: float  # Pa s
    permittivity: float = EPS0  # F/m

    def __post_init__(self):
        if not self.dynamic_viscosity > 0:
            raise ValueError(f"dynamic_viscosity must be > 0, got {self.dynamic_viscosity}")
        if not self.permittivity > 0:
            raise ValueError(f"permittivity must be > 0, got {self.permittivity}")


POLYSILICON = Material("polysilicon", youngs_modulus=160e9, density=2330.0)
AIR = Ambient("air", dynamic_viscosity=1.81e-5, permittivity=EPS0)

_DEFAULTS: dict[str, Material | Ambient | float] = {
    "polysilicon": POLYSILICON,
    "air": AIR,
    "vacuum-permittivity": EPS0,
}
_registry: dict[str, Material | Ambient | float] = dict(_DEFAULTS)


def default_material(name: str) -> Material | Ambient | float:
    """Look up a registered material, ambient, or named constant."""
    try:
        return _registry[name]
    except KeyError:
        known = ", ".join(sorted(_registry))
        raise UnknownMaterialError(f"unknown material {name!r} (known: {known})") from None


def register_material(entry: Material | Ambient) -> None:
    _registry[entry.name] = entry


def reset_registry() -> None:
    _registry.clear()
    _registry.update(_DEFAULTS)


_MATERIAL_KEYS = {f.name for f in fields(Material)} - {"name"}
_AMBIENT_KEYS = {f.name for f in fields(Ambient)} - {"name"}


def parse_registry(text: str, source: str = "<string>") -> list[Material | Ambient]:
    """Parse ``[name]`` sections of ``key = value`` lines.

    A section holding ``youngs_modulus``/``density`` is a :class:`Material`;
    one holding ``dynamic_viscosity`` (and optionally ``permittivity``) is an
    :class:`Ambient`. Keys are merged over an existing registry entry of the
    same name, so a file may override a single constant.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    out = []
    for name in cp.sections():
        values = {}
        for key, raw in cp.items(name):
            try:
                values[key] = float(raw)
            except ValueError:
                raise ConfigError(f"{source}: [{name}] {key} = {raw!r} is not a number") from None
        out.append(_build_entry(name, values, source))
    return out


def _build_entry(name, values, source):
    base = _registry.get(name)
    keys = set(values)
    if keys <= _MATERIAL_KEYS and (keys or isinstance(base, Material)):
        if isinstance(base, Material):
            merged = {"youngs_modulus": base.youngs_modulus, "density": base.density, **values}
        else:
            merged = values
        missing = _MATERIAL_KEYS - set(merged)
        if missing:
            raise ConfigError(f"{source}: [{name}] missing {sorted(missing)}")
        return Material(name, **merged)
    if keys <= _AMBIENT_KEYS:
        if isinstance(base, Ambient):
            merged = {"dynamic_viscosity": base.dynamic_viscosity, "permittivity": base.permittivity, **values}
        else:
            merged = values
        if "dynamic_viscosity" not in merged:
            raise ConfigError(f"{source}: [{name}] missing dynamic_viscosity")
        return Ambient(name, **merged)
    unknown = keys - _MATERIAL_KEYS - _AMBIENT_KEYS
    if unknown:
        raise ConfigError(f"{source}: [{name}] unknown keys {sorted(unknown)}")
    raise ConfigError(f"{source}: [{name}] mixes material and ambient keys")


def load_registry(path: str | Path) -> list[Material | Ambient]:
    """Read a registry file and register every entry in it."""
    path = Path(path)
    entries = parse_registry(path.read_text(encoding="utf-8"), source=str(path))
    for entry in entries:
        register_material(entry)
    return entries
