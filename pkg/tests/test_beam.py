import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from memsbpf.beam import (
    M_EFF_COEFF,
    CantileverBeam,
    _fd_matrices,
    fd_modal_oracle,
    lumped_params,
    modal_analysis,
    mode_constants,
    mode_shape,
    natural_frequency,
    synthesize_length,
)
from memsbpf.errors import GeometryError
from memsbpf.materials import POLYSILICON, Material


def bisect_root(fn, lo, hi, tol=1e-14):
    flo = fn(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (fn(mid) < 0) == (flo < 0):
            lo, flo = mid, fn(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


def char_eq(x):
    return math.cos(x) * math.cosh(x) + 1.0


class TestModeConstants:
    @pytest.mark.parametrize("n, bracket, frozen", [
        (1, (1.0, 3.0), 1.8751),
        (2, (4.0, 5.5), 4.6941),
        (3, (7.0, 8.5), 7.8548),
    ])
    def test_against_bisection_oracle(self, n, bracket, frozen):
        oracle = bisect_root(char_eq, *bracket)
        got = mode_constants(n)[n - 1]
        assert got == pytest.approx(oracle, abs=1e-10)
        assert got == pytest.approx(frozen, abs=1e-4)

    def test_higher_modes_are_roots(self):
        for x in mode_constants(8):
            assert abs(math.cos(x) + 1 / math.cosh(x)) < 1e-12

    def test_bad_count(self):
        with pytest.raises(ValueError):
            mode_constants(0)


class TestNaturalFrequency:
    def test_455khz_anchor(self, resonator_beam):
        assert natural_frequency(resonator_beam) == pytest.approx(455e3, rel=0.01)

    def test_80um_beam(self, resonator_beam):
        f = natural_frequency(resonator_beam.with_(length=80e-6))
        assert f == pytest.approx(455e3 * (76.7 / 80) ** 2, rel=0.01)
        assert f == pytest.approx(418e3, rel=0.01)

    def test_halving_length(self, resonator_beam):
        f = natural_frequency(resonator_beam)
        assert natural_frequency(resonator_beam.with_(length=resonator_beam.length / 2)) == pytest.approx(4 * f, rel=1e-14)

    def test_increasing_in_n(self, resonator_beam):
        fs = [natural_frequency(resonator_beam, n) for n in range(1, 7)]
        assert all(b > a for a, b in zip(fs, fs[1:]))

    @settings(max_examples=30, deadline=None)
    @given(st.floats(1e-6, 1e-4))
    def test_width_independent(self, b):
        ref = CantileverBeam(76.7e-6, 10e-6, 2e-6, 2e-6)
        assert natural_frequency(ref.with_(width=b)) == natural_frequency(ref)

    def test_thin_beam_warning(self):
        with pytest.warns(UserWarning, match="L/h"):
            CantileverBeam(10e-6, 5e-6, 2e-6, 2e-6)

    def test_invalid_geometry(self):
        with pytest.raises(GeometryError):
            CantileverBeam(76.7e-6, 0.0, 2e-6, 2e-6)


class TestModeShape:
    def test_boundary_conditions(self, resonator_beam):
        for n in (1, 2, 3):
            x, phi = mode_shape(resonator_beam, n, 10_001)
            assert phi[0] == pytest.approx(0.0, abs=1e-12)
            slope0 = (phi[1] - phi[0]) / (x[1] - x[0])
            slope_mid = np.max(np.abs(np.diff(phi) / np.diff(x)))
            assert abs(slope0) < 1e-3 * slope_mid
            assert phi[-1] == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_interior_nodes_by_sign_scan(self, resonator_beam, n):
        _, phi = mode_shape(resonator_beam, n, 10_000)
        interior = phi[1:-1]
        crossings = np.count_nonzero(np.diff(np.sign(interior)) != 0)
        assert crossings == n - 1

    def test_samples(self, resonator_beam):
        with pytest.raises(ValueError):
            mode_shape(resonator_beam, 1, 1)

    def test_modal_result_export(self, resonator_beam):
        res = modal_analysis(resonator_beam, 2, 11)
        assert res[0].to_csv().splitlines()[0] == "x_m,phi"
        assert len(res[0].to_csv().splitlines()) == 12
        doc = json.loads(res[1].to_json())
        assert doc["mode_index"] == 2 and len(doc["phi"]) == 11


class TestFDOracle:
    def test_matrix_symmetric(self):
        k, m = _fd_matrices(60)
        dense = k.toarray()
        assert np.allclose(dense, dense.T, rtol=0, atol=1e-9 * abs(dense).max())
        assert m[-1] == 0.5

    def test_mode1_matches_closed_form(self, resonator_beam):
        fd = fd_modal_oracle(resonator_beam, 400)
        assert fd[0] == pytest.approx(natural_frequency(resonator_beam), rel=5e-3)

    def test_mode_ratio(self, resonator_beam):
        fd = fd_modal_oracle(resonator_beam, 400)
        assert fd[1] / fd[0] == pytest.approx((4.6941 / 1.8751) ** 2, rel=0.01)
        assert fd[1] / fd[0] == pytest.approx(6.267, rel=0.01)

    def test_convergence_on_doubling(self, resonator_beam):
        f400 = fd_modal_oracle(resonator_beam, 400)[0]
        f800 = fd_modal_oracle(resonator_beam, 800)[0]
        assert abs(f800 / f400 - 1) < 1e-3

    def test_needs_50_nodes(self, resonator_beam):
        with pytest.raises(GeometryError):
            fd_modal_oracle(resonator_beam, 20)


class TestSynthesis:
    def test_455khz(self):
        assert synthesize_length(455e3, 2e-6, POLYSILICON) == pytest.approx(76.7e-6, rel=0.01)

    def test_quadrupled_frequency_halves_length(self):
        assert synthesize_length(4 * 455e3, 2e-6) == pytest.approx(synthesize_length(455e3, 2e-6) / 2, rel=1e-14)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e5, 1e7), st.floats(0.5e-6, 5e-6))
    def test_round_trip(self, f, h):
        L = synthesize_length(f, h)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            beam = CantileverBeam(L, 10e-6, h, 2e-6)
        assert natural_frequency(beam) == pytest.approx(f, rel=1e-9)

    def test_other_material(self):
        soft = Material("soft", youngs_modulus=40e9, density=2330.0)
        assert synthesize_length(455e3, 2e-6, soft) == pytest.approx(synthesize_length(455e3, 2e-6) / math.sqrt(2), rel=1e-12)


class TestLumped:
    def test_coefficient_from_mode_constant(self):
        assert M_EFF_COEFF == pytest.approx(3 / mode_constants(1)[0] ** 4, rel=2e-4)

    def test_frequency_identity(self, resonator_beam):
        lp = lumped_params(resonator_beam)
        w1 = 2 * math.pi * natural_frequency(resonator_beam)
        assert abs(w1 - lp.omega) / w1 < 1e-3

    def test_hand_mass(self, resonator_beam):
        assert lumped_params(resonator_beam).m_eff == pytest.approx(0.2427 * 2330 * 76.7e-6 * 10e-6 * 2e-6, rel=1e-12)

    def test_width_doubling(self, resonator_beam):
        a = lumped_params(resonator_beam)
        b = lumped_params(resonator_beam.with_(width=20e-6))
        assert b.k_eff == pytest.approx(2 * a.k_eff, rel=1e-14)
        assert b.m_eff == pytest.approx(2 * a.m_eff, rel=1e-14)
        assert b.frequency == pytest.approx(a.frequency, rel=1e-14)
