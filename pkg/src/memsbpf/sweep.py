"""Cross-product parameter sweeps over a named operation."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass
from typing import Callable

from memsbpf.beam import CantileverBeam, natural_frequency
from memsbpf.config import Axis, BEAM_KEYS, VARACTOR_KEYS
from memsbpf.damping import squeeze_film_q
from memsbpf.electrostatics import (
    PlateActuator,
    equilibrium_gap,
    overlap_capacitance,
    pull_in_voltage,
    suspension_stiffness,
)
from memsbpf.errors import ConfigError, TooManyPointsError
from memsbpf.filters import RCFilter, rc_response

MAX_POINTS = 1_000_000
MAX_AXES = 3


@dataclass
class SweepContext:
    actuator: PlateActuator
    beam: CantileverBeam
    spring_model: str = "fixed-guided"


@dataclass
class SweepResult:
    op: str
    columns: list[str]
    rows: list[list]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"op": self.op, "columns": self.columns, "rows": self.rows}, indent=2) + "\n"


def _beam_f1(ctx, p):
    beam = ctx.beam.with_(**p)
    return [natural_frequency(beam, 1)]


def _damping_q(ctx, p):
    beam = ctx.beam.with_(**p)
    f1 = natural_frequency(beam, 1)
    return [f1, squeeze_film_q(beam, f1)]


def _varactor_cv(ctx, p):
    geo = {k: v for k, v in p.items() if k != "voltage"}
    a = ctx.actuator.with_(**geo) if geo else ctx.actuator
    k = suspension_stiffness(a, ctx.spring_model)
    gap = equilibrium_gap(a, k, p["voltage"])
    if gap is None:
        return [None, None, 1]
    return [gap, overlap_capacitance(a, gap), 0]


def _pull_in(ctx, p):
    a = ctx.actuator.with_(**p)
    k = suspension_stiffness(a, ctx.spring_model)
    return [k, pull_in_voltage(a, k)]


def _rc_response(ctx, p):
    mag, ph = rc_response(RCFilter(p["R"], p["C"]), p["frequency"])
    return [mag, ph]


@dataclass(frozen=True)
class SweepOp:
    fn: Callable
    allowed: tuple[str, ...]
    outputs: tuple[str, ...]
    required: tuple[str, ...] = ()


OPS = {
    "beam-f1": SweepOp(_beam_f1, BEAM_KEYS, ("f1_Hz",)),
    "damping-q": SweepOp(_damping_q, BEAM_KEYS, ("f1_Hz", "Q")),
    "varactor-cv": SweepOp(_varactor_cv, ("voltage",) + VARACTOR_KEYS,
                           ("gap_m", "capacitance_F", "pulled_in"), ("voltage",)),
    "pull-in": SweepOp(_pull_in, VARACTOR_KEYS, ("k_N_per_m", "pull_in_V")),
    "rc-response": SweepOp(_rc_response, ("R", "C", "frequency"), ("magnitude", "phase_rad"),
                           ("R", "C", "frequency")),
}


def run_sweep(op: str, axes: list[Axis], ctx: SweepContext) -> SweepResult:
    """Evaluate ``op`` on the cross product of ``axes``.

    Rows come out in lexicographic order of the axes as given (last axis
    fastest). For ``varactor-cv`` each run along the voltage axis stops at
    its first pulled-in row, which is kept with ``pulled_in = 1``.
    """
    if op not in OPS:
        raise ConfigError(f"unknown sweep op {op!r}; choose from {sorted(OPS)}")
    spec = OPS[op]
    if not 1 <= len(axes) <= MAX_AXES:
        raise ConfigError(f"a sweep takes 1 to {MAX_AXES} axes, got {len(axes)}")
    names = [a.name for a in axes]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate sweep axis")
    for a in axes:
        if a.name not in spec.allowed:
            raise ConfigError(f"op {op!r} cannot sweep {a.name!r}; allowed: {list(spec.allowed)}")
        if a.steps < 1:
            raise ConfigError(f"axis {a.name!r} is empty")
    missing = [r for r in spec.required if r not in names]
    if missing:
        raise ConfigError(f"op {op!r} needs axes {missing}")
    total = math.prod(a.steps for a in axes)
    if total > MAX_POINTS:
        raise TooManyPointsError(f"{total} points exceeds the limit of {MAX_POINTS}")

    int_axes = {"beam_count", "hole_count"}
    rows = []
    # voltage-run bookkeeping for pull-in truncation
    stopped: set[tuple] = set()
    v_idx = names.index("voltage") if op == "varactor-cv" else None
    for combo in itertools.product(*(a.values() for a in axes)):
        params = {n: (int(round(v)) if n in int_axes else v) for n, v in zip(names, combo)}
        if v_idx is not None:
            group = combo[:v_idx] + combo[v_idx + 1:]
            if group in stopped:
                continue
        out = spec.fn(ctx, params)
        if v_idx is not None and out[-1] == 1:
            stopped.add(group)
        rows.append(list(combo) + out)
    return SweepResult(op, names + list(spec.outputs), rows)
