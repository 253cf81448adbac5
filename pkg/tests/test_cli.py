import json

import pytest

from memsbpf.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestExitCodes:
    def test_usage_error(self, capsys):
        code, _, err = run(capsys, "beam", "synth")
        assert code == 1 and err.startswith("error_code=usage")

    def test_unknown_command(self, capsys):
        code, _, err = run(capsys, "nonsense")
        assert code == 1 and "error_code=" in err

    def test_unknown_material(self, capsys):
        code, _, err = run(capsys, "beam", "synth", "--f0", "455e3", "--material", "unobtainium")
        assert code == 1 and err.startswith("error_code=")

    def test_computation_error(self, capsys):
        code, _, err = run(capsys, "filter", "rc", "--R", "-1", "--C", "1e-12")
        assert code == 2 and err.startswith("error_code=")

    def test_config_error(self, capsys, tmp_path):
        p = tmp_path / "bad.ini"
        p.write_text("[nowhere]\nx = 1\n")
        code, _, err = run(capsys, "beam", "synth", "--f0", "455e3", "--config", str(p))
        assert code == 1 and err.startswith("error_code=config")


class TestCommands:
    def test_beam_synth(self, capsys):
        code, out, _ = run(capsys, "beam", "synth", "--f0", "455e3", "--h", "2e-6", "--out", "-",
                           "--format", "json")
        doc = json.loads(out[:out.rindex("}") + 1])
        assert code == 0 and doc["length_m"] == pytest.approx(76.7e-6, rel=0.01)

    def test_filter_rc(self, capsys):
        code, out, _ = run(capsys, "filter", "rc", "--R", "903e3", "--C", "387.3e-15", "--analyze",
                           "--out", "-", "--format", "json")
        doc = json.loads(out[:out.rindex("}") + 1])
        hp = doc
        assert code == 0
        assert hp["f_center"] == pytest.approx(455e3, rel=5e-3)
        assert hp["Q"] == pytest.approx(1 / 3, rel=5e-3)

    def test_pullin_discloses_spring(self, capsys):
        code, out, _ = run(capsys, "varactor", "pullin", "--preset", "table1", "--spring", "cantilever")
        assert code == 0 and "cantilever" in out and "9.98" in out and "8.81" in out

    def test_cv_csv(self, capsys, tmp_path):
        p = tmp_path / "cv.csv"
        code, out, _ = run(capsys, "varactor", "cv", "--out", str(p), "--v-stop", "25")
        lines = p.read_text().splitlines()
        assert code == 0 and lines[0] == "voltage_V,capacitance_F"
        assert "pull-in" in out and "fixed-guided" in out

    def test_beam_modes(self, capsys, tmp_path):
        p = tmp_path / "modes.json"
        code, _, _ = run(capsys, "beam", "modes", "--L", "76.7e-6", "--out", str(p))
        doc = json.loads(p.read_text())
        f = [m["frequency_Hz"] for m in doc["modes"]]
        assert code == 0 and f[1] / f[0] == pytest.approx(6.267, rel=1e-3)
        assert doc["fd_oracle_Hz"][0] == pytest.approx(f[0], rel=5e-3)

    def test_damping(self, capsys):
        code, out, _ = run(capsys, "damping", "synth-width", "--Q", "50", "--f", "455e3")
        assert code == 0 and "10.85" in out
        code, out, _ = run(capsys, "damping", "q", "--b", "10.852e-6", "--f", "455e3")
        assert code == 0 and "Q = 49.99" in out

    def test_resonator(self, capsys):
        code, out, _ = run(capsys, "filter", "resonator", "--Q", "50", "--analyze")
        assert code == 0 and "Q = 50" in out

    def test_measure(self, capsys):
        code, out, _ = run(capsys, "measure", "find-peak")
        assert code == 0 and "441.1" in out
        code, out, _ = run(capsys, "measure", "fit-parasitic", "--c0", "387.3e-15", "--spring", "cantilever")
        assert code == 0 and "parasitic" in out

    def test_compare_table(self, capsys):
        code, out, _ = run(capsys, "compare", "--C", "387.3e-15", "--table")
        assert code == 0 and "quality factor" in out and "x150" in out

    def test_sweep_from_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.ini"
        out_path = tmp_path / "sweep.csv"
        cfg.write_text(f"[sweep]\nop = beam-f1\naxis.length = 50e-6, 100e-6, 6\n"
                       f"[output]\npath = {out_path}\n")
        code, _, _ = run(capsys, "sweep", "--config", str(cfg))
        rows = out_path.read_text().splitlines()
        assert code == 0 and rows[0] == "length,f1_Hz" and len(rows) == 7

    def test_sweep_axis_flag(self, capsys):
        code, out, _ = run(capsys, "sweep", "--op", "pull-in", "--axis", "gap0=1e-6,3e-6,3",
                           "--out", "-", "--format", "json")
        assert code == 0 and json.loads(out[:out.rindex("}") + 1])["op"] == "pull-in"


@pytest.mark.parametrize("argv", [
    ("varactor", "cv", "--v-stop", "25"),
    ("beam", "modes"),
    ("filter", "rc", "--R", "903e3", "--C", "387.3e-15", "--analyze"),
    ("filter", "resonator", "--analyze"),
    ("compare", "--C", "387.3e-15"),
])
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_byte_identical_reruns(capsys, tmp_path, argv, fmt):
    a, b = tmp_path / "a.out", tmp_path / "b.out"
    assert main([*argv, "--out", str(a), "--format", fmt]) == 0
    assert main([*argv, "--out", str(b), "--format", fmt]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_sweep_empty_axis_is_usage_error(capsys):
    code, _, err = run(capsys, "sweep", "--op", "varactor-cv", "--axis", "voltage=0,10,0")
    assert code == 1 and err.startswith("error_code=config")


def test_motional_current_spot_value(capsys):
    code, out, _ = run(capsys, "filter", "motional-current", "--Vp", "10", "--Cvar", "1e-15", "--f", "455e3")
    assert code == 0 and "28.58" in out


def test_cv_summary_reports_ratio(capsys):
    code, out, _ = run(capsys, "varactor", "cv", "--v-stop", "25")
    assert code == 0 and "C(V_pi-)/C(0) = 1.500" in out


def test_synth_r(capsys):
    code, out, _ = run(capsys, "filter", "synth-r", "--f0", "455e3", "--C", "387.3e-15")
    assert code == 0 and "903.1" in out


def test_find_peak_reports_analytic_gap(capsys):
    code, out, _ = run(capsys, "measure", "find-peak", "--out", "-", "--format", "json")
    doc = json.loads(out[:out.rindex("}") + 1])
    assert code == 0
    assert doc["analytic_f1_Hz"] == pytest.approx(418.3e3, rel=1e-3)
    assert doc["measured_vs_analytic"] == pytest.approx(441.2 / 418.3 - 1, abs=5e-3)
