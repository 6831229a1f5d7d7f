"""Channel model tests: path loss, knowledge coefficients, fading draws."""

import math

import numpy as np
import pytest
from scipy import stats

from cogofdm.channel import (
    CsiMode,
    CsiSpec,
    PathLossModel,
    compute_gamma,
    draw_realization,
    knowledge_coefficient,
    path_loss_db,
    pu_interference,
    pu_interference_profile,
)
from cogofdm.scenario import PuBand, default_scenario

# Model used in the worked examples: exponent 4, 0.33 m wavelength, 100 m anchor.
_MODEL = PathLossModel(exponent=4.0, wavelength_m=0.33, reference_distance_m=100.0)

# Free-space anchor, evaluated independently: 20*log10(4*pi*100/0.33) = 71.6139 dB.
_PL_100M = 20.0 * math.log10(4.0 * math.pi * 100.0 / 0.33)


class TestPathLoss:
    def test_reference_distance_value(self):
        assert path_loss_db(_MODEL, 100.0) == pytest.approx(_PL_100M, abs=1e-9)
        assert path_loss_db(_MODEL, 100.0) == pytest.approx(71.614, abs=5e-3)

    def test_five_km_value(self):
        # anchor + 40*log10(50) = 71.6139 + 67.9588
        expected = _PL_100M + 40.0 * math.log10(50.0)
        assert path_loss_db(_MODEL, 5000.0) == pytest.approx(expected, abs=1e-9)
        assert path_loss_db(_MODEL, 5000.0) == pytest.approx(139.573, abs=5e-3)

    def test_reference_distance_kills_distance_term(self):
        for model in (_MODEL, PathLossModel(2.5, 0.125, 10.0)):
            assert path_loss_db(model, model.reference_distance_m) == pytest.approx(
                model.free_space_reference_db
            )

    def test_monotone_in_distance(self):
        distances = np.linspace(100.0, 50000.0, 40)
        losses = [path_loss_db(_MODEL, d) for d in distances]
        assert np.all(np.diff(losses) >= 0.0)

    def test_below_reference_rejected(self):
        with pytest.raises(ValueError):
            path_loss_db(_MODEL, 99.0)

    def test_invalid_model_rejected(self):
        with pytest.raises(ValueError):
            PathLossModel(exponent=-1.0)
        with pytest.raises(ValueError):
            PathLossModel(reference_distance_m=0.0)


class TestKnowledgeCoefficient:
    def test_path_loss_only_at_zero_loss(self):
        assert knowledge_coefficient(CsiSpec(), 0.0) == pytest.approx(1.0)

    def test_path_loss_only_inverts_attenuation(self):
        assert knowledge_coefficient(CsiSpec(), 30.0) == pytest.approx(1000.0)

    def test_statistics_value(self):
        # 1 / (-ln 0.1) = 0.4342944819
        csi = CsiSpec(CsiMode.PATH_LOSS_AND_STATISTICS, psi_th=0.9, nu=1.0)
        assert knowledge_coefficient(csi, 0.0) == pytest.approx(
            1.0 / (-math.log(0.1)), rel=1e-12
        )
        assert knowledge_coefficient(csi, 0.0) == pytest.approx(0.43429, abs=1e-5)

    def test_full_csi_reciprocal(self):
        csi = CsiSpec(CsiMode.FULL_CSI)
        assert knowledge_coefficient(csi, 0.0, instantaneous_gain_sq=4.0) == 0.25

    def test_full_csi_zero_gain_rejected(self):
        csi = CsiSpec(CsiMode.FULL_CSI)
        with pytest.raises(ValueError):
            knowledge_coefficient(csi, 0.0, instantaneous_gain_sq=0.0)
        with pytest.raises(ValueError):
            knowledge_coefficient(csi, 0.0)

    def test_psi_out_of_range_rejected(self):
        for bad in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValueError):
                CsiSpec(CsiMode.PATH_LOSS_AND_STATISTICS, psi_th=bad, nu=1.0)

    def test_non_finite_path_loss_rejected(self):
        with pytest.raises(ValueError):
            knowledge_coefficient(CsiSpec(), math.inf)

    def test_decreasing_in_confidence(self):
        # a tighter guarantee must shrink the power budget
        grid = np.linspace(0.05, 0.95, 19)
        values = [
            knowledge_coefficient(
                CsiSpec(CsiMode.PATH_LOSS_AND_STATISTICS, psi_th=float(p), nu=1.0), 60.0
            )
            for p in grid
        ]
        assert np.all(np.diff(values) < 0.0)

    def test_statistics_below_path_loss_only_beyond_crossover(self):
        # with nu = 1 the crossover sits at psi = 1 - 1/e
        crossover = 1.0 - math.exp(-1.0)
        pl = 42.0
        base = knowledge_coefficient(CsiSpec(), pl)
        for psi, expect_smaller in ((crossover + 0.05, True), (crossover - 0.05, False)):
            stat = knowledge_coefficient(
                CsiSpec(CsiMode.PATH_LOSS_AND_STATISTICS, psi_th=psi, nu=1.0), pl
            )
            assert (stat < base) == expect_smaller


class TestGamma:
    def test_ratio_definition(self):
        gamma = compute_gamma(np.array([1.0]), 1e-15, np.array([0.0]))
        assert gamma[0] == pytest.approx(1e15)

    def test_scaling_invariance(self):
        gains = np.array([0.3, 1.7, 2.2])
        noise = 2e-4
        interference = np.array([1e-4, 0.0, 5e-5])
        base = compute_gamma(gains, noise, interference)
        for c in (10.0, 1e6):
            scaled = compute_gamma(c * gains, c * noise, c * interference)
            assert scaled == pytest.approx(base, rel=1e-12)

    def test_finite_and_nonnegative(self):
        cfg = default_scenario()
        real = draw_realization(123, cfg)
        assert real.gamma.shape == (cfg.n_subcarriers,)
        assert np.all(real.gamma >= 0.0)
        assert np.all(np.isfinite(real.gamma))


class TestDrawRealization:
    def test_unit_mean_power(self):
        cfg = default_scenario(n_subcarriers=100000, adjacent_pus=default_scenario().adjacent_pus)
        real = draw_realization(42, cfg)
        mean_power = float(np.mean(np.abs(real.su_gains) ** 2))
        assert abs(mean_power - 1.0) < 0.02

    def test_deterministic_in_seed(self):
        cfg = default_scenario()
        a = draw_realization(7, cfg)
        b = draw_realization(7, cfg)
        assert np.array_equal(a.su_gains, b.su_gains)
        assert a.pu_cochannel_gain == b.pu_cochannel_gain
        assert np.array_equal(a.pu_adjacent_gains, b.pu_adjacent_gains)
        assert np.array_equal(a.gamma, b.gamma)
        c = draw_realization(8, cfg)
        assert not np.array_equal(a.su_gains, c.su_gains)

    def test_squared_pu_gain_is_exponential(self):
        # Kolmogorov-Smirnov against Exponential(1) at the 1% level
        cfg = default_scenario(n_subcarriers=4)
        samples = np.array(
            [
                abs(draw_realization(seed, cfg).pu_cochannel_gain) ** 2
                for seed in range(10000)
            ]
        )
        result = stats.kstest(samples, "expon")
        assert result.pvalue > 0.01


class TestPuInterference:
    def test_disjoint_bands_give_zero(self):
        # silence the co-channel PU and put the adjacent band outside the SU band
        cfg = default_scenario(pu_signal_variance_w=0.0)
        for i in (0, cfg.n_subcarriers - 1):
            assert pu_interference(cfg, i) == 0.0

    def test_proportional_overlap(self):
        # one PU band twice as wide as the whole 4-subcarrier SU band, unit path gain
        cfg = default_scenario(
            n_subcarriers=4,
            subcarrier_spacing_hz=1000.0,
            pu_interference_includes_path_gain=False,
            pu_signal_variance_w=0.0,  # silence the co-channel PU
            adjacent_pus=(
                PuBand(
                    center_offset_hz=0.0,
                    bandwidth_hz=8000.0,
                    distance_m=1200.0,
                    threshold_w=1e-11,
                ),
            ),
        )
        sigma_sq = 3e-3
        cfg = default_scenario(
            n_subcarriers=4,
            subcarrier_spacing_hz=1000.0,
            pu_interference_includes_path_gain=False,
            noise_variance_w=1e-15,
            pu_signal_variance_w=sigma_sq,
            adjacent_pus=cfg.adjacent_pus,
        )
        # co-channel PU also overlaps; its band is the SU band (4 kHz wide)
        expected = sigma_sq * (1000.0 / 8000.0) + sigma_sq * (1000.0 / 4000.0)
        profile = pu_interference_profile(cfg)
        assert profile == pytest.approx(np.full(4, expected), rel=1e-12)

    def test_additive_over_pus(self):
        band = PuBand(0.0, 8000.0, 1200.0, 1e-11)
        make = lambda bands: default_scenario(
            n_subcarriers=4,
            subcarrier_spacing_hz=1000.0,
            pu_interference_includes_path_gain=False,
            pu_signal_variance_w=2e-4,
            adjacent_pus=bands,
        )
        one = pu_interference_profile(make((band,)))
        two = pu_interference_profile(make((band, band)))
        cochannel = pu_interference_profile(make(()))
        assert two == pytest.approx(2.0 * one - cochannel, rel=1e-12)

    def test_default_scenario_interference_negligible(self):
        # distant co-channel PU: path gain ~1e-14 makes J << noise
        cfg = default_scenario()
        profile = pu_interference_profile(cfg)
        assert np.all(profile < 1e-3 * cfg.noise_variance_w)
        assert np.all(profile > 0.0)
