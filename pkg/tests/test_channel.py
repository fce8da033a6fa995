import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trbeam.channel import (CirSet, ConfigError, DegenerateChannelError,
                            PRESETS, PdpSpec, channel_power, draw_cir,
                            pdp_profile, preset, realization_rng)


class TestPdpSpecValidation:
    def test_unknown_variant(self):
        with pytest.raises(ConfigError):
            PdpSpec(variant="bogus", Ts=1e-9, L=4, sigma=1e-9)

    def test_bad_times(self):
        with pytest.raises(ConfigError):
            PdpSpec.one_cluster(Ts=0.0, sigma=8e-9, L=4)
        with pytest.raises(ConfigError):
            PdpSpec.one_cluster(Ts=1e-9, sigma=-1e-9, L=4)

    def test_bad_length(self):
        with pytest.raises(ConfigError):
            PdpSpec.one_cluster(Ts=1e-9, sigma=8e-9, L=0)

    def test_cluster_ordering(self):
        for L1, L2 in ((0, 4), (4, 4), (5, 4), (2, 9)):
            with pytest.raises(ConfigError):
                PdpSpec.two_cluster(Ts=1e-9, sigma1=8e-9, sigma2=14e-9,
                                    L1=L1, L2=L2, L=8, gamma=0.5)

    def test_missing_two_cluster_params(self):
        with pytest.raises(ConfigError):
            PdpSpec(variant="two_cluster", Ts=1e-9, L=8, sigma1=8e-9)

    def test_dict_round_trip(self):
        spec = preset("ts5-model2")
        assert PdpSpec.from_dict(spec.to_dict()) == spec

    def test_from_dict_rejects_unknown_keys(self):
        d = preset("ts5-model1").to_dict()
        d["bogus"] = 1
        with pytest.raises(ConfigError):
            PdpSpec.from_dict(d)


class TestPdpProfile:
    def test_sums_to_gamma(self):
        for spec in PRESETS.values():
            prof = pdp_profile(spec)
            assert prof.p.sum() == pytest.approx(spec.Gamma, rel=1e-12)
            assert np.all(prof.p > 0)

    def test_one_cluster_shape(self):
        spec = PdpSpec.one_cluster(Ts=2e-9, sigma=8e-9, L=6)
        prof = pdp_profile(spec)
        ratios = prof.p[1:] / prof.p[:-1]
        assert ratios == pytest.approx(
            np.full(5, math.exp(-spec.Ts / spec.sigma)), rel=1e-12)

    def test_one_cluster_hand_value(self):
        # e^{-Ts/sigma} = 1/2 with L=2: p = [2/3, 1/3] * Gamma
        spec = PdpSpec.one_cluster(Ts=math.log(2.0) * 8e-9, sigma=8e-9,
                                   L=2, Gamma=0.3)
        prof = pdp_profile(spec)
        assert prof.p == pytest.approx([0.2, 0.1], rel=1e-12)

    def test_two_cluster_regions(self):
        spec = preset("ts2.5-model2")
        prof = pdp_profile(spec)
        n = np.arange(spec.L)
        first = prof.A * np.exp(-n * spec.Ts / spec.sigma1)
        second = prof.A * spec.gamma * np.exp(
            -(n - spec.L1) * spec.Ts / spec.sigma2)
        # before the second cluster starts only the first branch exists
        assert prof.p[:spec.L1] == pytest.approx(first[:spec.L1], rel=1e-12)
        # in the overlap both branches add
        mid = slice(spec.L1, spec.L2)
        assert prof.p[mid] == pytest.approx(first[mid] + second[mid],
                                            rel=1e-12)
        # after the first cluster ends only the second remains
        tail = slice(spec.L2, spec.L)
        assert prof.p[tail] == pytest.approx(second[tail], rel=1e-12)

    def test_two_cluster_collapse(self):
        one = PdpSpec.one_cluster(Ts=2.5e-9, sigma=8e-9, L=12)
        two = PdpSpec.two_cluster(Ts=2.5e-9, sigma1=8e-9, sigma2=14e-9,
                                  L1=4, L2=12, L=12, gamma=1e-14)
        assert pdp_profile(two).p == pytest.approx(pdp_profile(one).p,
                                                   rel=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(L=st.integers(1, 50), ts=st.floats(0.1, 5.0),
           gamma_tot=st.floats(1e-4, 10.0))
    def test_profile_positive_and_normalized(self, L, ts, gamma_tot):
        spec = PdpSpec.one_cluster(Ts=ts * 1e-9, sigma=8e-9, L=L,
                                   Gamma=gamma_tot)
        prof = pdp_profile(spec)
        assert np.all(prof.p > 0)
        assert prof.p.sum() == pytest.approx(gamma_tot, rel=1e-10)


class TestRng:
    def test_reproducible(self):
        a = realization_rng(5, 7).standard_normal(8)
        b = realization_rng(5, 7).standard_normal(8)
        assert np.array_equal(a, b)

    def test_streams_differ(self):
        a = realization_rng(5, 7).standard_normal(8)
        b = realization_rng(5, 8).standard_normal(8)
        c = realization_rng(6, 7).standard_normal(8)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestDrawCir:
    def test_shape_and_dtype(self):
        cirs = draw_cir(preset("ts5-model1"), 4, realization_rng(0, 0))
        assert cirs.taps.shape == (4, 17)
        assert cirs.taps.dtype == np.complex128
        assert cirs.M == 4 and cirs.L == 17

    def test_bad_m(self):
        with pytest.raises(ConfigError):
            draw_cir(preset("ts5-model1"), 0, realization_rng(0, 0))

    def test_tap_statistics(self):
        spec = preset("ts10-model2")
        rng = realization_rng(1, 0)
        taps = np.stack([draw_cir(spec, 1, rng).taps[0]
                         for _ in range(20000)])
        p = pdp_profile(spec).p
        assert np.abs(taps.mean(axis=0)).max() < 4e-3
        var = np.mean(np.abs(taps) ** 2, axis=0)
        assert var == pytest.approx(p, rel=0.06)
        # real and imaginary parts carry half the tap power each
        assert np.var(taps.real, axis=0) == pytest.approx(p / 2, rel=0.09)

    def test_mean_power_is_gamma_per_antenna(self):
        spec = preset("ts5-model2")
        rng = realization_rng(2, 0)
        powers = [channel_power(draw_cir(spec, 3, rng)) for _ in range(4000)]
        assert np.mean(powers) == pytest.approx(3 * spec.Gamma, rel=0.03)

    def test_channel_power_degenerate(self):
        cirs = CirSet(taps=np.zeros((2, 4), dtype=complex),
                      spec=preset("ts10-model1"))
        with pytest.raises(DegenerateChannelError):
            channel_power(cirs)


class TestPresets:
    def test_table_values(self):
        expect = {
            "ts2.5-model1": (2.5e-9, 33), "ts5-model1": (5e-9, 17),
            "ts10-model1": (10e-9, 9), "ts2.5-model2": (2.5e-9, 33),
            "ts5-model2": (5e-9, 17), "ts10-model2": (10e-9, 9),
        }
        for name, (ts, L) in expect.items():
            spec = preset(name)
            assert spec.Ts == pytest.approx(ts)
            assert spec.L == L
            assert spec.Gamma == pytest.approx(1e-2)
        two = preset("ts2.5-model2")
        assert (two.L1, two.L2) == (9, 17)
        assert two.sigma1 == pytest.approx(8e-9)
        assert two.sigma2 == pytest.approx(14e-9)
        assert two.gamma == pytest.approx(0.4786)

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            preset("ts7-model3")
