import numpy as np
import pytest

from trbeam.beamform import (MODE_ETR, MODE_TR, NearSingularChannelError,
                             build_etr, build_tr, composite_for_unintended,
                             etr_composite, power_breakdown, tr_composite,
                             zf_equalizer)
from trbeam.channel import (CirSet, DegenerateChannelError, draw_cir, preset,
                            realization_rng)


def cirs_from(taps, name="ts5-model1"):
    return CirSet(taps=np.atleast_2d(np.asarray(taps, dtype=complex)),
                  spec=preset(name))


def random_cirs(seed=0, name="ts5-model1", M=4):
    return draw_cir(preset(name), M, realization_rng(seed, 0))


class TestTr:
    def test_hand_case(self):
        # h = [1, j]: P_h = 2, autocorrelation [-j, 2, j] / sqrt(2)
        c = tr_composite(cirs_from([[1.0, 1j]]))
        expect = np.array([-1j, 2.0, 1j]) / np.sqrt(2.0)
        assert c.taps == pytest.approx(expect, abs=1e-12)
        assert c.peak_index == 1

    def test_bank_radiates_unit_power(self):
        bank = build_tr(random_cirs(1))
        assert np.sum(np.abs(bank.filters) ** 2) == pytest.approx(1.0,
                                                                  rel=1e-12)
        assert bank.mode == MODE_TR

    def test_peak_is_real_sqrt_ph(self):
        cirs = random_cirs(2)
        ph = np.sum(np.abs(cirs.taps) ** 2)
        c = tr_composite(cirs)
        peak = c.taps[c.peak_index]
        assert peak.imag == pytest.approx(0.0, abs=1e-14)
        assert peak.real == pytest.approx(np.sqrt(ph), rel=1e-12)

    def test_hermitian_symmetry(self):
        c = tr_composite(random_cirs(3))
        assert c.taps == pytest.approx(np.conj(c.taps[::-1]), abs=1e-12)

    def test_peak_dominates(self):
        # Cauchy-Schwarz: no off-peak autocorrelation lag can beat lag zero
        for seed in range(6):
            c = tr_composite(random_cirs(seed))
            mags = np.abs(c.taps)
            assert np.argmax(mags) == c.peak_index

    def test_zero_channel_raises(self):
        with pytest.raises(DegenerateChannelError):
            tr_composite(cirs_from([[0.0, 0.0]]))


class TestBreakdown:
    def test_hand_case(self):
        b = power_breakdown(tr_composite(cirs_from([[1.0, 1j]])))
        assert b["P_S_inst"] == pytest.approx(2.0, abs=1e-12)
        assert b["P_ISI_inst"] == pytest.approx(1.0, abs=1e-12)

    def test_scales_with_rho(self):
        cirs = random_cirs(4)
        b1 = power_breakdown(tr_composite(cirs, rho=1.0))
        b3 = power_breakdown(tr_composite(cirs, rho=3.0))
        assert b3["P_S_inst"] == pytest.approx(3 * b1["P_S_inst"])
        assert b3["P_ISI_inst"] == pytest.approx(3 * b1["P_ISI_inst"])

    def test_sums_to_total_power(self):
        c = tr_composite(random_cirs(5), rho=2.0)
        b = power_breakdown(c)
        total = 2.0 * np.sum(np.abs(c.taps) ** 2)
        assert b["P_S_inst"] + b["P_ISI_inst"] == pytest.approx(total,
                                                               rel=1e-12)


class TestEqualizer:
    def test_lengths_and_delay(self):
        cirs = random_cirs(6)
        L, L_E = cirs.L, 25
        eq = zf_equalizer(cirs, L_E)
        assert eq.g.size == L_E
        assert eq.n0 == (2 * L + L_E - 2) // 2
        c = etr_composite(cirs, eq)
        assert c.taps.size == 2 * L + L_E - 2
        assert c.peak_index == eq.n0 - eq.window_offset

    def test_peak_index_is_argmax(self):
        for seed in range(8):
            cirs = random_cirs(seed, name="ts2.5-model2")
            c = etr_composite(cirs, zf_equalizer(cirs, cirs.L))
            assert int(np.argmax(np.abs(c.taps))) == c.peak_index

    def test_equalization_suppresses_isi(self):
        cirs = random_cirs(7, name="ts10-model1")
        ratios = []
        for le in (3, 9, 72):
            b = power_breakdown(etr_composite(cirs, zf_equalizer(cirs, le)))
            ratios.append(b["P_S_inst"] / b["P_ISI_inst"])
        assert ratios[0] < ratios[1] < ratios[2]
        tr = power_breakdown(tr_composite(cirs))
        assert ratios[2] > 10 * tr["P_S_inst"] / tr["P_ISI_inst"]

    def test_explicit_n0(self):
        cirs = random_cirs(8)
        eq = zf_equalizer(cirs, 10, n0=5)
        assert eq.n0 == 5
        with pytest.raises(ValueError):
            zf_equalizer(cirs, 10, n0=-1)
        with pytest.raises(ValueError):
            zf_equalizer(cirs, 10, n0=2 * cirs.L + 10 - 2)

    def test_bad_length(self):
        with pytest.raises(ValueError):
            zf_equalizer(random_cirs(9), 0)

    def test_spectral_null_raises(self):
        # h = [1, -1] nulls the DC bin of the summed spectrum
        with pytest.raises(NearSingularChannelError):
            zf_equalizer(cirs_from([[1.0, -1.0]]), 2)

    def test_bank_radiates_unit_power(self):
        cirs = random_cirs(10)
        bank = build_etr(cirs, zf_equalizer(cirs, cirs.L))
        assert np.sum(np.abs(bank.filters) ** 2) == pytest.approx(1.0,
                                                                  rel=1e-12)
        assert bank.mode == MODE_ETR


class TestUnintended:
    def test_matches_intended_when_same_channel(self):
        cirs = random_cirs(11)
        tr = tr_composite(cirs)
        cross = composite_for_unintended(cirs, cirs, MODE_TR)
        assert cross.taps == pytest.approx(tr.taps, rel=1e-12)
        eq = zf_equalizer(cirs, 12)
        etr = etr_composite(cirs, eq)
        cross = composite_for_unintended(cirs, cirs, MODE_ETR, eq)
        assert cross.taps == pytest.approx(etr.taps, rel=1e-12)

    def test_cross_power_much_lower(self):
        cirs = random_cirs(12)
        other = draw_cir(cirs.spec, cirs.M, realization_rng(12, 1))
        tr = tr_composite(cirs)
        cross = composite_for_unintended(cirs, other, MODE_TR)
        assert (np.abs(cross.taps[cross.peak_index])
                < np.abs(tr.taps[tr.peak_index]))

    def test_etr_requires_equalizer(self):
        cirs = random_cirs(13)
        with pytest.raises(ValueError):
            composite_for_unintended(cirs, cirs, MODE_ETR)

    def test_unknown_mode(self):
        cirs = random_cirs(14)
        with pytest.raises(ValueError):
            composite_for_unintended(cirs, cirs, "zf")
