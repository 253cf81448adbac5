"""Command-line front end.

Every command writes its result table or document to ``--out`` (``-`` for
stdout) in ``--format csv|json`` and prints a one-line summary. Numeric
flags are plain SI values. Exit status: 0 ok, 1 usage error, 2 computation
error; errors go to stderr as ``error_code=<code> <message>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from memsbpf import units
from memsbpf.beam import (
    CantileverBeam,
    fd_modal_oracle,
    lumped_params,
    modal_analysis,
    natural_frequency,
    synthesize_length,
)
from memsbpf.config import RunConfig, load_config, parse_axis
from memsbpf.damping import squeeze_film_q, synthesize_width
from memsbpf.design import DesignSpec, compare, synthesize_design
from memsbpf.electrostatics import (
    SPRING_MODELS,
    cv_curve,
    overlap_capacitance,
    pull_in_edge,
    pull_in_voltage,
    suspension_stiffness,
    table1_actuator,
)
from memsbpf.errors import ConfigError, MemsError, UnknownMaterialError
from memsbpf.filters import (
    RCFilter,
    ResonatorDrive,
    half_power_analysis,
    log_grid,
    motional_current_amplitude,
    rc_center_frequency,
    rc_response_curve,
    resonator_bandpass_curve,
    resonator_grid,
    synthesize_resistance,
)
from memsbpf.materials import Ambient, Material, default_material
from memsbpf.measurement import bundled_dataset, extract_parasitic, find_resonance_peak, load_curve
from memsbpf.sweep import SweepContext, run_sweep

BUNDLED_BEAM_LENGTH = 80e-6
FEM_PULL_IN_V = 8.81  # coupled electromechanical simulation of the fabricated varactor


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- helpers


def _material(name: str, cfg: RunConfig, kind=Material):
    for entry in cfg.materials:
        if entry.name == name and isinstance(entry, kind):
            return entry
    m = default_material(name)
    if not isinstance(m, kind):
        raise UnknownMaterialError(f"{name!r} is not a {kind.__name__.lower()}")
    return m


def _actuator(args, cfg: RunConfig):
    a = table1_actuator(material=_material(getattr(args, "material", None) or "polysilicon", cfg))
    if cfg.varactor:
        a = a.with_(**cfg.varactor)
    if getattr(args, "gap0", None) is not None:
        a = a.with_(gap0=args.gap0)
    if getattr(args, "fringing", None) is not None:
        a = a.with_(fringing_factor=args.fringing)
    return a


def _beam(args, cfg: RunConfig):
    vals = {"length": 76.7e-6, "width": 10e-6, "thickness": 2e-6, "gap": 2e-6}
    vals.update({k: v for k, v in cfg.beam.items() if k != "material"})
    for flag, key in (("L", "length"), ("b", "width"), ("h", "thickness"), ("gap", "gap")):
        v = getattr(args, flag, None)
        if v is not None:
            vals[key] = v
    mat = _material(getattr(args, "material", None) or cfg.beam.get("material", "polysilicon"), cfg)
    return CantileverBeam(material=mat, **vals)


def _record_csv(record: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["quantity", "value"])
    for k, v in record.items():
        w.writerow([k, "" if v is None else (repr(v) if isinstance(v, float) else v)])
    return buf.getvalue()


def _emit(args, cfg: RunConfig, *, csv_text=None, json_text=None, record=None):
    out = args.out or cfg.output_path
    if out is None:
        return
    fmt = args.format or cfg.output_format or ("json" if str(out).endswith(".json") else "csv")
    if record is not None:
        csv_text = _record_csv(record)
        json_text = json.dumps(record, indent=2) + "\n"
    text = csv_text if fmt == "csv" else json_text
    if text is None:
        raise UsageError(f"format {fmt!r} not available for this command")
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------- commands


def cmd_varactor_cv(args, cfg):
    a = _actuator(args, cfg)
    spring = args.spring or cfg.spring_model
    k = suspension_stiffness(a, spring)
    curve = cv_curve(a, k, args.v_start, args.v_stop, args.steps, spring_model=spring)
    _emit(args, cfg, csv_text=curve.to_csv(), json_text=curve.to_json())
    if curve.pull_in_voltage is None:
        tail = "no pull-in in range"
    else:
        ratio = curve.pull_in_capacitance / curve.capacitances[0]
        tail = f"pull-in at {curve.pull_in_voltage:.6g} V, C(V_pi-)/C(0) = {ratio:.4f}"
    print(f"C(0) = {units.fmt(curve.capacitances[0], 'fF')}, {len(curve.voltages)} stable points, "
          f"{tail} [spring model: {spring}]")


def cmd_varactor_pullin(args, cfg):
    a = _actuator(args, cfg)
    spring = args.spring or cfg.spring_model
    k = suspension_stiffness(a, spring)
    v_an = pull_in_voltage(a, k, "analytic")
    v_ct, x_ct = pull_in_edge(a, k)
    dev = v_an / FEM_PULL_IN_V - 1.0
    record = {
        "spring_model": spring,
        "k_N_per_m": k,
        "fringing_factor": a.fringing_factor,
        "C0_F": overlap_capacitance(a, a.gap0),
        "pull_in_analytic_V": v_an,
        "pull_in_continuation_V": v_ct,
        "displacement_at_pull_in_m": x_ct,
        "displacement_over_gap": x_ct / a.gap0,
        "fem_reference_V": FEM_PULL_IN_V,
        "deviation_from_fem": dev,
    }
    _emit(args, cfg, record=record)
    print(f"V_pi = {v_an:.6g} V analytic, {v_ct:.6g} V continuation [lumped {spring} spring, "
          f"k = {k:.6g} N/m]; finite-element reference {FEM_PULL_IN_V} V ({dev:+.1%})")


def cmd_beam_modes(args, cfg):
    beam = _beam(args, cfg)
    modes = modal_analysis(beam, args.n_modes, args.samples)
    fd = fd_modal_oracle(beam, args.fd_nodes, min(args.n_modes, 3)) if args.fd_nodes else []
    doc = {
        "beam": {"length_m": beam.length, "width_m": beam.width, "thickness_m": beam.thickness,
                 "gap_m": beam.gap, "material": beam.material.name},
        "modes": [m.to_dict() for m in modes],
        "fd_oracle_Hz": fd,
    }
    if not 1 <= args.mode <= len(modes):
        raise UsageError("--mode must be between 1 and --n-modes")
    _emit(args, cfg, csv_text=modes[args.mode - 1].to_csv(), json_text=json.dumps(doc, indent=2) + "\n")
    freqs = ", ".join(f"f{m.mode_index} = {m.frequency:.6g} Hz" for m in modes)
    extra = f"; FD check f1 = {fd[0]:.6g} Hz" if fd else ""
    print(freqs + extra)


def cmd_beam_synth(args, cfg):
    mat = _material(args.material, cfg)
    L = synthesize_length(args.f0, args.h, mat)
    record = {"f0_Hz": args.f0, "thickness_m": args.h, "length_m": L, "material": mat.name,
              "youngs_modulus_Pa": mat.youngs_modulus, "density_kg_m3": mat.density}
    _emit(args, cfg, record=record)
    print(f"L = {units.fmt(L, 'um')} for f1 = {units.fmt(args.f0, 'kHz')} "
          f"(h = {units.fmt(args.h, 'um')}, {mat.name})")


def cmd_damping_q(args, cfg):
    beam = _beam(args, cfg)
    ambient = _material(args.ambient, cfg, Ambient)
    f = args.f if args.f is not None else natural_frequency(beam, 1)
    q = squeeze_film_q(beam, f, ambient)
    _emit(args, cfg, record={"frequency_Hz": f, "width_m": beam.width, "Q": q})
    print(f"Q = {q:.6g} at {units.fmt(f, 'kHz')} (b = {units.fmt(beam.width, 'um')})")


def cmd_damping_synth_width(args, cfg):
    beam = _beam(args, cfg)
    ambient = _material(args.ambient, cfg, Ambient)
    f = args.f if args.f is not None else natural_frequency(beam, 1)
    b = synthesize_width(args.Q, beam.thickness, beam.gap, f, beam.material, ambient)
    _emit(args, cfg, record={"Q_target": args.Q, "frequency_Hz": f, "width_m": b})
    print(f"b = {units.fmt(b, 'um')} for Q = {args.Q:g} at {units.fmt(f, 'kHz')}")


def cmd_filter_rc(args, cfg):
    filt = RCFilter(args.R, args.C)
    f0 = rc_center_frequency(filt)
    freqs = log_grid(args.f_start or f0 / 100, args.f_stop or f0 * 100, args.ppd)
    curve = rc_response_curve(filt, freqs)
    hp = half_power_analysis(curve) if args.analyze else None
    _emit(args, cfg, csv_text=curve.to_csv(), json_text=curve.to_json(hp))
    line = f"f0 = {units.fmt(f0, 'kHz')}"
    if hp:
        line += (f"; f_center = {units.fmt(hp.f_center, 'kHz')}, f_low = {units.fmt(hp.f_low, 'kHz')}, "
                 f"f_high = {units.fmt(hp.f_high, 'kHz')}, Q = {hp.Q:.6g}")
    print(line)


def cmd_filter_resonator(args, cfg):
    beam = _beam(args, cfg)
    lumped = lumped_params(beam)
    q = args.Q if args.Q is not None else squeeze_film_q(beam)
    area = args.area if args.area is not None else beam.width * beam.length / 2
    drive = ResonatorDrive(args.Vp, args.vi, area, args.Ro)
    f1 = natural_frequency(beam, 1)
    freqs = resonator_grid(f1, q) if args.f_start is None else log_grid(args.f_start, args.f_stop, args.ppd)
    curve = resonator_bandpass_curve(beam, lumped, q, drive, freqs, normalize=args.normalize)
    hp = half_power_analysis(curve) if args.analyze else None
    _emit(args, cfg, csv_text=curve.to_csv(), json_text=curve.to_json(hp))
    line = f"f1 = {units.fmt(f1, 'kHz')}, Q_in = {q:.6g}, peak i_out = {curve.magnitudes.max():.6g}"
    line += "" if args.normalize else " A"
    if hp:
        line += f"; f_center = {units.fmt(hp.f_center, 'kHz')}, Q = {hp.Q:.6g}"
    print(line)


def cmd_filter_synth_r(args, cfg):
    r = synthesize_resistance(args.f0, args.C)
    _emit(args, cfg, record={"f0_Hz": args.f0, "C_F": args.C, "R_ohm": r})
    print(f"R = {r / 1e3:.6g} kOhm for f0 = {units.fmt(args.f0, 'kHz')} with C = {units.fmt(args.C, 'fF')}")


def cmd_filter_motional_current(args, cfg):
    i_out = motional_current_amplitude(args.Vp, args.Cvar, args.f)
    _emit(args, cfg, record={"V_p_V": args.Vp, "C_var_F": args.Cvar, "frequency_Hz": args.f,
                             "i_out_A": i_out})
    print(f"i_out = {i_out * 1e9:.6g} nA (V_p = {args.Vp:g} V, C_var = {units.fmt(args.Cvar, 'fF')}, "
          f"f = {units.fmt(args.f, 'kHz')})")


def _measured(args, kind):
    path = args.data if args.data else bundled_dataset(kind)
    return load_curve(path, kind)


def cmd_measure_fit_parasitic(args, cfg):
    measured = _measured(args, "cv")
    a = _actuator(args, cfg)
    if args.c0 is not None:
        a = a.with_(fringing_factor=a.fringing_factor * args.c0 / overlap_capacitance(a, a.gap0))
    spring = args.spring or cfg.spring_model
    k = suspension_stiffness(a, spring)
    model = cv_curve(a, k, float(measured.x[0]), float(measured.x[-1]), len(measured.x), spring_model=spring)
    c_par = extract_parasitic(measured, model)
    record = {"dataset": measured.label, "spring_model": spring, "model_C0_F": model.capacitances[0],
              "parasitic_F": c_par}
    _emit(args, cfg, record=record)
    print(f"parallel parasitic = {units.fmt(c_par, 'pF')} "
          f"(model C(0) = {units.fmt(model.capacitances[0], 'fF')}, {spring} spring)")


def cmd_measure_find_peak(args, cfg):
    spectrum = _measured(args, "spectrum")
    peak = find_resonance_peak(spectrum)
    record = {"dataset": spectrum.label, "f_peak_Hz": peak.f_peak,
              "amplitude": peak.amplitude, "Q_est": peak.Q_est}
    # the bundled spectrum belongs to an 80 um beam
    length = args.L if args.L is not None else (None if args.data else BUNDLED_BEAM_LENGTH)
    q = "n/a" if peak.Q_est is None else f"{peak.Q_est:.4g}"
    line = f"f_peak = {units.fmt(peak.f_peak, 'kHz')}, Q_est = {q}"
    if length is not None:
        # width does not enter the clamped-free frequency
        beam = CantileverBeam(length, 10e-6, args.h, 2e-6, _material(args.material, cfg))
        f1 = natural_frequency(beam, 1)
        gap = peak.f_peak / f1 - 1.0
        record.update({"beam_length_m": length, "analytic_f1_Hz": f1, "measured_vs_analytic": gap})
        line += f"; analytic f1 = {units.fmt(f1, 'kHz')} for L = {units.fmt(length, 'um')} ({gap:+.1%})"
    _emit(args, cfg, record=record)
    print(line)


def cmd_compare(args, cfg):
    mat = _material(args.material, cfg)
    spring = args.spring or cfg.spring_model
    rc = synthesize_design(DesignSpec(args.f0, "rc"), actuator=_actuator(args, cfg),
                           spring_model=spring, capacitance=args.C, material=mat,
                           sheet_resistance=args.sheet_resistance)
    res = synthesize_design(DesignSpec(args.f0, "resonator", args.Q), material=mat, V_p=args.Vp)
    report = compare(rc, res)
    flat = {}
    for topo in ("rc", "resonator"):
        entry = getattr(report, topo)
        for key, value in entry.items():
            if key == "key_dimensions":
                flat.update({f"{topo}.{k}": v for k, v in value.items() if not isinstance(v, list)})
            elif key != "topology":
                flat[f"{topo}.{key}"] = value
    flat.update({f"ratio.{k}": v for k, v in report.ratios.items()})
    flat.update({f"check.{k}": str(v).lower() for k, v in report.checks.items()})
    _emit(args, cfg, csv_text=_record_csv(flat), json_text=report.to_json())
    if args.table:
        sys.stdout.write(report.to_text())
    r = report.ratios
    print(f"Q {report.resonator['Q']:.4g} vs {report.rc['Q']:.4g} (x{r['Q_resonator_over_rc']:.4g}); "
          f"area ratio {r['area_rc_over_resonator']:.4g}; tunability {report.rc['tunability']:.1%} vs "
          f"{report.resonator['tunability']:.2%}")


def cmd_sweep(args, cfg):
    op = args.op or cfg.sweep_op
    if op is None:
        raise UsageError("sweep needs --op or [sweep] op in the config")
    axes = list(cfg.axes)
    for text in args.axis or []:
        name, sep, rng = text.partition("=")
        if not sep:
            raise UsageError(f"--axis expects name=start,stop,steps; got {text!r}")
        axes.append(parse_axis(name.strip(), rng))
    if not axes:
        raise UsageError("sweep needs at least one axis")
    spring = args.spring or cfg.spring_model
    ctx = SweepContext(_actuator(args, cfg), _beam(args, cfg), spring)
    result = run_sweep(op, axes, ctx)
    _emit(args, cfg, csv_text=result.to_csv(), json_text=result.to_json())
    print(f"{op}: {len(result.rows)} rows x {len(result.columns)} columns")


# ---------------------------------------------------------------- parser


def _common(p):
    p.add_argument("--config", help="run configuration file")
    p.add_argument("--out", help="output file, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"))


def _varactor_flags(p):
    p.add_argument("--preset", choices=("table1",), default="table1")
    p.add_argument("--spring", choices=SPRING_MODELS)
    p.add_argument("--fringing", type=float)
    p.add_argument("--gap0", type=float)
    p.add_argument("--material", default="polysilicon")


def _beam_flags(p):
    p.add_argument("--L", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--gap", type=float)
    p.add_argument("--material")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="memsbpf", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def sub(group_parser, name, fn, help_):
        p = group_parser.add_parser(name, help=help_)
        _common(p)
        p.set_defaults(fn=fn)
        return p

    var = groups.add_parser("varactor", help="parallel-plate varactor").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = sub(var, "cv", cmd_varactor_cv, "C-V curve up to pull-in")
    _varactor_flags(p)
    p.add_argument("--v-start", type=float, default=0.0)
    p.add_argument("--v-stop", type=float, default=12.0)
    p.add_argument("--steps", type=int, default=121)
    p = sub(var, "pullin", cmd_varactor_pullin, "pull-in voltage")
    _varactor_flags(p)

    beam = groups.add_parser("beam", help="cantilever beam").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = sub(beam, "modes", cmd_beam_modes, "modal frequencies and shapes")
    _beam_flags(p)
    p.add_argument("--n-modes", type=int, default=3)
    p.add_argument("--mode", type=int, default=1, help="mode written to CSV")
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--fd-nodes", type=int, default=400, help="0 disables the FD check")
    p = sub(beam, "synth", cmd_beam_synth, "length for a target mode-1 frequency")
    p.add_argument("--f0", type=float, required=True)
    p.add_argument("--h", type=float, default=2e-6)
    p.add_argument("--material", default="polysilicon")

    damp = groups.add_parser("damping", help="squeeze-film damping").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = sub(damp, "q", cmd_damping_q, "squeeze-film Q")
    _beam_flags(p)
    p.add_argument("--f", type=float, help="default: beam mode-1 frequency")
    p.add_argument("--ambient", default="air")
    p = sub(damp, "synth-width", cmd_damping_synth_width, "width for a target Q")
    _beam_flags(p)
    p.add_argument("--Q", type=float, required=True)
    p.add_argument("--f", type=float, help="default: beam mode-1 frequency")
    p.add_argument("--ambient", default="air")

    filt = groups.add_parser("filter", help="filter responses").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = sub(filt, "rc", cmd_filter_rc, "RC band-pass response")
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--analyze", action="store_true")
    p.add_argument("--f-start", type=float)
    p.add_argument("--f-stop", type=float)
    p.add_argument("--ppd", type=int, default=200, help="points per decade")
    p = sub(filt, "resonator", cmd_filter_resonator, "resonator motional-current response")
    _beam_flags(p)
    p.add_argument("--Q", type=float, help="default: squeeze-film Q of the beam")
    p.add_argument("--Vp", type=float, default=10.0)
    p.add_argument("--vi", type=float, default=0.1)
    p.add_argument("--area", type=float, help="electrode overlap area, default b*L/2")
    p.add_argument("--Ro", type=float)
    p.add_argument("--analyze", action="store_true")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--f-start", type=float)
    p.add_argument("--f-stop", type=float)
    p.add_argument("--ppd", type=int, default=200)
    p = sub(filt, "synth-r", cmd_filter_synth_r, "R for a target RC centre frequency")
    p.add_argument("--f0", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    p = sub(filt, "motional-current", cmd_filter_motional_current, "output current amplitude V_p C_var w")
    p.add_argument("--Vp", type=float, required=True)
    p.add_argument("--Cvar", type=float, required=True, help="capacitance swing amplitude")
    p.add_argument("--f", type=float, required=True)

    meas = groups.add_parser("measure", help="measured data").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = sub(meas, "fit-parasitic", cmd_measure_fit_parasitic, "parallel parasitic capacitance")
    _varactor_flags(p)
    p.add_argument("--data", help="C-V CSV; default: bundled dataset")
    p.add_argument("--c0", type=float, help="calibrate model C(0) via the fringing factor")
    p = sub(meas, "find-peak", cmd_measure_find_peak, "resonance peak of a spectrum")
    p.add_argument("--data", help="spectrum CSV; default: bundled dataset")
    p.add_argument("--L", type=float, help="beam length for the analytic f1 comparison")
    p.add_argument("--h", type=float, default=2e-6)
    p.add_argument("--material", default="polysilicon")

    p = groups.add_parser("compare", help="RC vs resonator comparison report")
    _common(p)
    _varactor_flags(p)
    p.set_defaults(fn=cmd_compare)
    p.add_argument("--f0", type=float, default=455e3)
    p.add_argument("--Q", type=float, default=50.0)
    p.add_argument("--C", type=float, help="varactor C(0); default: model value")
    p.add_argument("--Vp", type=float, default=10.0)
    p.add_argument("--sheet-resistance", type=float, default=30.0)
    p.add_argument("--table", action="store_true", help="print the text comparison table")

    p = groups.add_parser("sweep", help="parameter sweep")
    _common(p)
    p.set_defaults(fn=cmd_sweep)
    p.add_argument("--op")
    p.add_argument("--axis", action="append", help="name=start,stop,steps (repeatable)")
    p.add_argument("--spring", choices=SPRING_MODELS)
    _beam_flags(p)
    p.add_argument("--fringing", type=float)
    p.add_argument("--gap0", type=float)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config) if args.config else RunConfig()
        args.fn(args, cfg)
    except (UsageError, ConfigError) as exc:
        print(f"error_code={getattr(exc, 'code', 'usage')} {exc}", file=sys.stderr)
        return 1
    except UnknownMaterialError as exc:
        print(f"error_code={exc.code} {exc}", file=sys.stderr)
        return 1
    except (MemsError, ValueError) as exc:
        print(f"error_code={getattr(exc, 'code', 'computation')} {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error_code=io {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
