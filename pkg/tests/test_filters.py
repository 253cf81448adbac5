import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from memsbpf.beam import lumped_params, natural_frequency
from memsbpf.errors import CutoffOutOfRangeError, NoPeakError
from memsbpf.filters import (
    OutputCapacitance,
    RCFilter,
    ResonatorDrive,
    ResponseCurve,
    half_power_analysis,
    log_grid,
    motional_current_amplitude,
    output_capacitance,
    rc_center_frequency,
    rc_response,
    rc_response_curve,
    resonator_bandpass_curve,
    resonator_response,
    serpentine_resistance,
    size_serpentine,
    synthesize_resistance,
)
from memsbpf.materials import EPS0

# |H| = 1/sqrt(2)/3 where (1 - x^2)^2 = 9 x^2, x = f/f0
X_LOW = (-3 + math.sqrt(13)) / 2
X_HIGH = (3 + math.sqrt(13)) / 2

BUILT_RC = RCFilter(890e3, 387.3e-15)


class TestRCResponse:
    @settings(max_examples=50)
    @given(st.floats(1.0, 1e9), st.floats(1e-16, 1e-6))
    def test_peak_is_one_third(self, R, C):
        f = RCFilter(R, C)
        mag, ph = rc_response(f, rc_center_frequency(f))
        assert mag == pytest.approx(1 / 3, rel=1e-12)
        assert ph == pytest.approx(0.0, abs=1e-12)

    def test_band_pass_limits(self):
        f0 = rc_center_frequency(BUILT_RC)
        lo, _ = rc_response(BUILT_RC, f0 * 1e-6)
        hi, _ = rc_response(BUILT_RC, f0 * 1e6)
        assert lo < 1e-5 and hi < 1e-5

    def test_vectorized(self):
        mag, ph = rc_response(BUILT_RC, np.array([1e5, 4.6e5, 1e6]))
        assert mag.shape == (3,) and ph.shape == (3,)

    def test_center_frequency(self):
        assert rc_center_frequency(BUILT_RC) == pytest.approx(461.7e3, rel=1e-3)
        assert rc_center_frequency(RCFilter(903e3, 387.3e-15)) == pytest.approx(455e3, rel=3e-3)
        assert rc_center_frequency(RCFilter(1806e3, 387.3e-15)) == pytest.approx(
            rc_center_frequency(RCFilter(903e3, 387.3e-15)) / 2, rel=1e-14)

    def test_invalid(self):
        with pytest.raises(ValueError):
            RCFilter(0.0, 1e-12)
        with pytest.raises(ValueError):
            rc_response(BUILT_RC, 0.0)


class TestHalfPower:
    def test_analytic_cutoffs(self):
        hp = half_power_analysis(rc_response_curve(BUILT_RC))
        f0 = rc_center_frequency(BUILT_RC)
        assert X_LOW == pytest.approx(0.3028, abs=1e-4) and X_HIGH == pytest.approx(3.3028, abs=1e-4)
        assert hp.f_low == pytest.approx(X_LOW * f0, rel=1e-3)
        assert hp.f_high == pytest.approx(X_HIGH * f0, rel=1e-3)
        assert hp.f_center == pytest.approx(f0, rel=1e-4)
        assert hp.Q == pytest.approx(1 / 3, rel=5e-3)

    def test_graph_read_cutoffs_within_5pct(self):
        hp = half_power_analysis(rc_response_curve(BUILT_RC))
        assert hp.f_low == pytest.approx(139.8e3, rel=1e-3)
        assert hp.f_high == pytest.approx(1.525e6, rel=1e-3)
        assert abs(hp.f_low / 139e3 - 1) < 0.05
        assert abs(hp.f_high / 1.48e6 - 1) < 0.05

    def test_reported_q_from_its_own_numbers(self):
        assert 455 / (1480 - 139) == pytest.approx(0.339, abs=1e-3)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(10.0, 1e8), st.floats(1e-15, 1e-6), st.floats(0, 1))
    def test_q_one_third_on_offset_grids(self, R, C, shift):
        f0 = rc_center_frequency(RCFilter(R, C))
        # grid not aligned with f0
        grid = log_grid(f0 / 50 * 10 ** (shift / 200), f0 * 50, 200)
        hp = half_power_analysis(rc_response_curve(RCFilter(R, C), grid))
        assert hp.Q == pytest.approx(1 / 3, rel=5e-3)

    def test_monotone_curve(self):
        f = np.linspace(1, 10, 20)
        with pytest.raises(NoPeakError):
            half_power_analysis(ResponseCurve(f, f, np.zeros_like(f)))

    def test_cutoff_outside_range(self):
        f0 = rc_center_frequency(BUILT_RC)
        curve = rc_response_curve(BUILT_RC, log_grid(f0 / 2, f0 * 2, 200))
        with pytest.raises(CutoffOutOfRangeError):
            half_power_analysis(curve)


class TestResistors:
    def test_synthesis(self):
        assert synthesize_resistance(455e3, 387.3e-15) == pytest.approx(903e3, rel=5e-3)

    def test_c_doubling(self):
        assert synthesize_resistance(455e3, 774.6e-15) == pytest.approx(
            synthesize_resistance(455e3, 387.3e-15) / 2, rel=1e-14)

    @settings(max_examples=50)
    @given(st.floats(1e3, 1e9), st.floats(1e-15, 1e-9))
    def test_round_trip(self, f0, C):
        assert rc_center_frequency(RCFilter(synthesize_resistance(f0, C), C)) == pytest.approx(f0, rel=1e-12)

    def test_serpentine_one_square(self):
        assert serpentine_resistance(5e-6, 5e-6, 1, 0, 30.0) == pytest.approx(30.0, rel=1e-15)

    def test_serpentine_hand_value(self):
        assert serpentine_resistance(300e-6, 1e-6, 100, 99, 30.0) == pytest.approx(30 * (30000 + 55.44), rel=1e-12)

    def test_serpentine_width(self):
        a = serpentine_resistance(300e-6, 1e-6, 10, 0, 30.0)
        assert serpentine_resistance(300e-6, 2e-6, 10, 0, 30.0) == pytest.approx(a / 2, rel=1e-14)

    def test_size_serpentine_exact(self):
        s = size_serpentine(903e3, 30.0, 2e-6, 2e-6, 300e-6)
        assert s.resistance == pytest.approx(903e3, rel=1e-12)
        assert s.segment_length <= 300e-6
        assert s.bbox_area > 0


@pytest.fixture
def drive():
    return ResonatorDrive(V_p=10.0, v_i_amplitude=0.1, electrode_overlap_area=10e-6 * 38e-6)


def velocity_magnitude(f, f1, Q):
    # closed form of w * X(w), up to a constant
    w, w1 = 2 * np.pi * f, 2 * np.pi * f1
    return w / np.sqrt((w1**2 - w**2) ** 2 + (w1 * w / Q) ** 2)


class TestResonator:
    def test_eq7_spot_value(self):
        assert motional_current_amplitude(10.0, 1e-15, 455e3) == pytest.approx(28.6e-9, rel=5e-3)

    def test_output_capacitance_signal(self, resonator_beam, drive):
        lp = lumped_params(resonator_beam)
        oc = output_capacitance(resonator_beam, lp, 50, drive, 455e3)
        assert oc.C_fix == pytest.approx(EPS0 * drive.electrode_overlap_area / 2e-6)
        t = np.linspace(0, 1 / 455e3, 101)
        # i = V_p dC/dt against a finite difference of C_o(t)
        dc = np.gradient(oc.at(t), t)
        assert np.allclose(10.0 * dc[1:-1], oc.motional_current(t, 10.0)[1:-1], rtol=1e-3,
                           atol=1e-3 * 10.0 * oc.C_var * oc.omega)

    def test_resonant_amplification(self, resonator_beam, drive):
        lp = lumped_params(resonator_beam)
        f1 = natural_frequency(resonator_beam)
        for Q in (10, 50, 200):
            pt = resonator_response(resonator_beam, lp, Q, drive, f1)
            force = EPS0 * drive.electrode_overlap_area * 10.0 * 0.1 / 2e-6**2
            assert pt.tip_displacement == pytest.approx(Q * force / lp.k_eff, rel=0.01)

    def test_no_drive(self, resonator_beam):
        lp = lumped_params(resonator_beam)
        pt = resonator_response(resonator_beam, lp, 50, ResonatorDrive(10.0, 0.0, 1e-10), 455e3)
        assert pt.tip_displacement == 0.0 and pt.i_out_amplitude == 0.0

    def test_linear_in_drive(self, resonator_beam):
        lp = lumped_params(resonator_beam)
        f = np.array([3e5, 4.55e5, 6e5])
        a = resonator_response(resonator_beam, lp, 50, ResonatorDrive(10.0, 0.1, 1e-10), f)
        b = resonator_response(resonator_beam, lp, 50, ResonatorDrive(10.0, 0.3, 1e-10), f)
        assert np.allclose(b.i_out_amplitude, 3 * a.i_out_amplitude, rtol=1e-12)

    def test_large_drive_warns(self):
        with pytest.warns(UserWarning):
            ResonatorDrive(1.0, 0.5, 1e-10)

    def test_peak_by_dense_scan(self, resonator_beam, drive):
        lp = lumped_params(resonator_beam)
        f1 = natural_frequency(resonator_beam)
        curve = resonator_bandpass_curve(resonator_beam, lp, 50, drive)
        dense = np.linspace(0.95 * f1, 1.05 * f1, 200_001)
        oracle_peak = dense[np.argmax(velocity_magnitude(dense, f1, 50))]
        hp = half_power_analysis(curve)
        assert hp.f_center == pytest.approx(oracle_peak, rel=1e-3)
        assert hp.f_center == pytest.approx(f1, rel=1e-3)

    @pytest.mark.parametrize("Q", [10, 25, 50, 100, 200])
    def test_extracted_q(self, resonator_beam, drive, Q):
        lp = lumped_params(resonator_beam)
        hp = half_power_analysis(resonator_bandpass_curve(resonator_beam, lp, Q, drive))
        assert hp.Q == pytest.approx(Q, rel=0.02)

    def test_selectivity(self, resonator_beam, drive):
        lp = lumped_params(resonator_beam)
        f1 = natural_frequency(resonator_beam)
        at = resonator_response(resonator_beam, lp, 50, drive, np.array([f1, 2 * f1])).i_out_amplitude
        assert at[1] / at[0] < 0.05

    def test_grid_misses_peak(self, resonator_beam, drive):
        lp = lumped_params(resonator_beam)
        with pytest.raises(NoPeakError):
            resonator_bandpass_curve(resonator_beam, lp, 50, drive, log_grid(1e6, 2e6))

    def test_normalized_and_csv(self, resonator_beam, drive):
        lp = lumped_params(resonator_beam)
        c = resonator_bandpass_curve(resonator_beam, lp, 50, drive, normalize=True)
        assert c.magnitudes.max() == 1.0
        assert c.to_csv().splitlines()[0] == "frequency_Hz,magnitude,phase_rad"

    def test_output_capacitance_invariants(self):
        with pytest.raises(ValueError):
            OutputCapacitance(0.0, 1e-15, 1.0)
