import math

import numpy as np
import pytest

from wdmprov.clock import VirtualClock
from wdmprov.linesys import (
    Amplifier,
    FiberSpan,
    FluctuationParams,
    FrequencyOutOfRangeError,
    LineSystem,
    OpticalLink,
    PLANCK_H,
    UnachievableError,
)
from wdmprov.modes import MODE_400G_16QAM, PROBE_MODE_16QAM
from wdmprov.qot import ber_from_gsnr, db_to_linear


def single_amp_link(link_id="lk", n=1, gain_db=8.0, nf_db=5.0, eta=0.0,
                    sigma=0.0, seed=1, gsnr_tilt=0.0, amp_tilt=0.0):
    span = FiberSpan(length_km=32.0, loss_db_per_km=gain_db / 32.0,
                     nli_eta_per_mw2=eta)
    amp = Amplifier(gain_db=gain_db, noise_figure_db=nf_db,
                    tilt_db_per_thz=amp_tilt)
    return OpticalLink(
        id=link_id, kind="AAL", elements=tuple((span, amp) for _ in range(n)),
        fluctuation=FluctuationParams(sigma_db=sigma, seed=seed),
        gsnr_tilt_db_per_thz=gsnr_tilt)


class TestAseSnr:
    def test_single_amp_closed_form(self):
        """Hand-evaluated oracle: P_ase = NF*h*nu*(G-1)*B, SNR = P/P_ase."""
        sys = LineSystem([single_amp_link()])
        p_ch = db_to_linear(4.0) * 1e-3
        p_ase = (db_to_linear(5.0) * PLANCK_H * 191.5e12
                 * (db_to_linear(8.0) - 1.0) * 64e9)
        expect = 10.0 * math.log10(p_ch / p_ase)
        assert expect == pytest.approx(42.653356, abs=1e-4)
        assert sys.ase_snr("lk", 191.5) == pytest.approx(expect, abs=1e-9)

    def test_no_amplifier_is_noise_free(self):
        link = OpticalLink(id="bare", kind="CL", elements=())
        sys = LineSystem([link])
        assert sys.ase_snr("bare", 191.5) == math.inf

    def test_doubling_chain_costs_3db(self):
        sys = LineSystem([single_amp_link("one", n=1),
                          single_amp_link("two", n=2)])
        one = sys.ase_snr("one", 191.5)
        two = sys.ase_snr("two", 191.5)
        assert one - two == pytest.approx(10.0 * math.log10(2.0), abs=1e-9)

    def test_amp_tilt_matches_manual_propagation(self):
        sys = LineSystem([single_amp_link("t", n=3, amp_tilt=0.2)])
        freq = 194.5
        df = freq - 191.5
        p_sig = db_to_linear(4.0) * 1e-3
        p_ase = 0.0
        for _ in range(3):
            att = db_to_linear(8.0)
            p_sig /= att
            p_ase /= att
            g = db_to_linear(8.0 + 0.2 * df)
            nf = db_to_linear(5.0 - 0.2 * df)
            p_sig *= g
            p_ase *= g
            p_ase += nf * PLANCK_H * 191.5e12 * (g - 1.0) * 64e9
        expect = 10.0 * math.log10(p_sig / p_ase)
        assert sys.ase_snr("t", freq) == pytest.approx(expect, abs=1e-9)


class TestNliSnr:
    def test_zero_eta_is_transparent(self):
        sys = LineSystem([single_amp_link()])
        assert sys.nli_snr("lk", 191.5) == math.inf

    def test_power_squared_scaling(self):
        """Doubling launch power quadruples the inverse NLI SNR."""
        sys = LineSystem([single_amp_link("nl", eta=1e-5)])
        base = sys.nli_snr("nl", 191.5, launch_power_dbm=4.0)
        hot = sys.nli_snr("nl", 191.5,
                          launch_power_dbm=4.0 + 10.0 * math.log10(2.0))
        assert base - hot == pytest.approx(20.0 * math.log10(2.0), abs=1e-9)

    def test_incoherent_span_sum(self):
        sys = LineSystem([single_amp_link("one", n=1, eta=1e-5),
                          single_amp_link("two", n=2, eta=1e-5)])
        one = sys.nli_snr("one", 191.5)
        two = sys.nli_snr("two", 191.5)
        assert one - two == pytest.approx(10.0 * math.log10(2.0), abs=1e-9)


class TestLinkGsnr:
    def test_constant_without_drift_or_tilt(self):
        sys = LineSystem([single_amp_link()])
        ref = sys.link_gsnr("lk", 191.5, 0.0)
        for freq, t in [(191.5, 0.0), (196.0, 0.0), (191.5, 86400.0)]:
            assert sys.link_gsnr("lk", freq, t) == pytest.approx(ref, abs=1e-9)

    def test_positive_tilt_monotone_in_frequency(self):
        sys = LineSystem([single_amp_link("t", gsnr_tilt=0.05)])
        freqs = np.arange(191.3, 196.2, 0.1)
        vals = [sys.link_gsnr("t", float(f), 0.0) for f in freqs]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_drift_deterministic_per_seed(self):
        make = lambda: LineSystem([single_amp_link("d", sigma=0.05, seed=9)],
                                  seed=1234)
        ts = np.arange(0.0, 3600.0, 5.0)
        a = make().link_gsnr_series("d", 191.5, ts)
        b = make().link_gsnr_series("d", 191.5, ts)
        assert np.array_equal(a, b)
        other = LineSystem([single_amp_link("d", sigma=0.05, seed=9)], seed=99)
        assert not np.array_equal(a, other.link_gsnr_series("d", 191.5, ts))

    def test_drift_query_order_independent(self):
        sys = LineSystem([single_amp_link("d", sigma=0.05, seed=5)], seed=7)
        late = sys.link_gsnr("d", 191.5, 10_000.0)
        early = sys.link_gsnr("d", 191.5, 50.0)
        sys2 = LineSystem([single_amp_link("d", sigma=0.05, seed=5)], seed=7)
        assert sys2.link_gsnr("d", 191.5, 50.0) == early
        assert sys2.link_gsnr("d", 191.5, 10_000.0) == late

    def test_drift_stationary_scale(self):
        sys = LineSystem([single_amp_link("d", sigma=0.05, seed=3)], seed=3)
        ts = np.arange(0.0, 7 * 86400.0, 5.0)
        series = sys.link_gsnr_series("d", 191.5, ts)
        assert 0.03 <= float(np.std(series)) <= 0.07


class TestCalibration:
    def test_hits_target(self):
        sys = LineSystem([single_amp_link(eta=1e-5)])
        sys.recalibrate("lk", 23.3, 191.5)
        assert sys.link_gsnr("lk", 191.5, 0.0) == pytest.approx(23.3, abs=0.01)

    def test_idempotent(self):
        sys = LineSystem([single_amp_link(eta=1e-5)])
        sys.recalibrate("lk", 23.3, 191.5)
        first = sys.links["lk"]
        again = sys.calibrate_link("lk", 23.3, 191.5)
        for (_, a), (_, b) in zip(first.elements, again.elements):
            assert a.noise_figure_db == pytest.approx(b.noise_figure_db, abs=1e-9)

    def test_noise_free_target_unachievable(self):
        sys = LineSystem([single_amp_link()])
        with pytest.raises(UnachievableError):
            sys.calibrate_link("lk", math.inf, 191.5)

    def test_nli_bound_unachievable(self):
        sys = LineSystem([single_amp_link(eta=1e-2)])
        nli_db = sys.nli_snr("lk", 191.5)
        with pytest.raises(UnachievableError):
            sys.calibrate_link("lk", nli_db + 1.0, 191.5)

    def test_nf_floor(self):
        sys = LineSystem([single_amp_link()])
        bound = sys.ase_snr("lk", 191.5) + 5.0  # needs NF 5 dB below current
        with pytest.raises(UnachievableError):
            sys.calibrate_link("lk", bound + 0.1, 191.5)


class TestMeasureBer:
    def test_empty_path_is_back_to_back(self):
        sys = LineSystem([])
        clock = VirtualClock()
        reading = sys.measure_ber([], 17.35, PROBE_MODE_16QAM, 191.5, 30.0, clock)
        assert reading.ber == pytest.approx(
            ber_from_gsnr(17.35, PROBE_MODE_16QAM.modulation), rel=1e-12)
        assert clock.now == 30.0

    def test_window_invariant_when_static(self):
        sys = LineSystem([single_amp_link(eta=1e-5)])
        sys.recalibrate("lk", 23.3, 191.5)
        r1 = sys.measure_ber(["lk"], 17.35, PROBE_MODE_16QAM, 191.5, 30.0,
                             VirtualClock())
        r2 = sys.measure_ber(["lk"], 17.35, PROBE_MODE_16QAM, 191.5, 60.0,
                             VirtualClock())
        assert r1.ber == pytest.approx(r2.ber, rel=1e-12)

    def test_path_composition_matches_reciprocal_sum(self):
        links = [single_amp_link(f"l{i}", n=i + 1, eta=1e-5) for i in range(3)]
        sys = LineSystem(links)
        ids = [lk.id for lk in links]
        total = sys.path_gsnr(ids, 17.51, 191.5, 0.0)
        inv = 1.0 / db_to_linear(17.51)
        inv += sum(1.0 / db_to_linear(sys.link_gsnr(i, 191.5, 0.0)) for i in ids)
        assert 1.0 / db_to_linear(total) == pytest.approx(inv, rel=1e-9)

    def test_frequency_range_enforced(self):
        sys = LineSystem([single_amp_link()])
        with pytest.raises(FrequencyOutOfRangeError):
            sys.measure_ber(["lk"], 17.35, MODE_400G_16QAM, 190.0, 30.0,
                            VirtualClock(), freq_range_thz=(191.3, 196.1))

    def test_gain_must_compensate_loss(self):
        span = FiberSpan(length_km=32.0, loss_db_per_km=0.25)
        with pytest.raises(ValueError):
            OpticalLink(id="bad", kind="AAL",
                        elements=((span, Amplifier(gain_db=12.0)),))
