import math

import numpy as np
import pytest

from bellfringe import (
    ModelParams,
    NoiseConfig,
    bell_witness,
    blur_visibility,
    compute_moments,
    delta_mixture,
    delta_thermal_mixture,
    ensemble_moments,
    gauss_hermite_rule,
    ground_state,
    phase_squeezing,
    split_gaussian_rule,
    thermal_ensemble,
    visibility,
    witness_with_noise,
)


class TestNoiseConfig:
    def test_defaults_are_noiseless(self):
        cfg = NoiseConfig()
        assert cfg.sigma_delta == cfg.temperature == cfg.sigma_detector == 0.0

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            NoiseConfig(sigma_delta=-0.1)
        with pytest.raises(ValueError):
            NoiseConfig(temperature=-1.0)

    def test_blur_needs_wavevector(self):
        with pytest.raises(ValueError):
            NoiseConfig(sigma_detector=0.5, k_fringe=0.0)


class TestGaussHermiteRule:
    def test_weights_normalized(self):
        rule = gauss_hermite_rule(41, 0.3)
        assert rule.weights.sum() == pytest.approx(1.0, abs=1e-14)
        assert np.all(rule.weights > 0)

    def test_moments_of_gaussian(self):
        sigma = 0.7
        rule = gauss_hermite_rule(21, sigma)
        assert np.dot(rule.weights, rule.nodes) == pytest.approx(0.0, abs=1e-12)
        assert np.dot(rule.weights, rule.nodes**2) == pytest.approx(
            sigma**2, rel=1e-12
        )
        assert np.dot(rule.weights, rule.nodes**4) == pytest.approx(
            3 * sigma**4, rel=1e-12
        )

    def test_nodes_symmetric(self):
        rule = gauss_hermite_rule(11, 1.0)
        assert np.allclose(rule.nodes, -rule.nodes[::-1])


class TestSplitGaussianRule:
    def test_moments_of_gaussian(self):
        sigma = 0.4
        rule = split_gaussian_rule(31, sigma)
        assert rule.weights.sum() == pytest.approx(1.0, abs=1e-14)
        assert np.dot(rule.weights, rule.nodes) == pytest.approx(0.0, abs=1e-14)
        assert np.dot(rule.weights, rule.nodes**2) == pytest.approx(
            sigma**2, rel=1e-10
        )
        assert np.dot(rule.weights, rule.nodes**4) == pytest.approx(
            3 * sigma**4, rel=1e-10
        )

    def test_handles_kink_at_origin(self):
        # integrates sign-discontinuous functions exactly where a global
        # rule cannot: E[|x|] = sigma sqrt(2/pi)
        sigma = 0.7
        rule = split_gaussian_rule(31, sigma)
        want = sigma * math.sqrt(2.0 / math.pi)
        assert np.dot(rule.weights, np.abs(rule.nodes)) == pytest.approx(
            want, rel=1e-10
        )

    def test_nodes_symmetric_and_nonzero(self):
        rule = split_gaussian_rule(15, 1.0)
        assert np.allclose(rule.nodes, -rule.nodes[::-1])
        assert np.all(rule.nodes != 0.0)


class TestDeltaMixture:
    def test_zero_sigma_is_pure(self):
        ens = delta_mixture(40, -0.5, 0.0)
        assert len(ens.states) == 1
        _, gs = ground_state(ModelParams(40, -0.5, 0.0))
        assert np.allclose(ens.states[0].coeffs, gs.coeffs)

    def test_symmetry_restored_on_average(self):
        # the tilt averages out: <Jz> and <Jy> of the mixture vanish
        m = ensemble_moments(delta_mixture(60, -0.8, 0.05))
        assert m.jz == pytest.approx(0.0, abs=1e-10)
        assert m.jy == 0.0

    def test_degrades_witness(self):
        n = 100
        clean = ensemble_moments(delta_mixture(n, -0.9, 0.0))
        noisy = ensemble_moments(delta_mixture(n, -0.9, 0.05))
        b_clean = bell_witness(phase_squeezing(clean, n), visibility(clean, n))
        b_noisy = bell_witness(phase_squeezing(noisy, n), visibility(noisy, n))
        assert b_noisy > b_clean

    def test_converged_against_high_order(self):
        n = 80
        low = ensemble_moments(delta_mixture(n, -0.7, 0.03, order=41))
        high = ensemble_moments(delta_mixture(n, -0.7, 0.03, order=121, check=False))
        assert low.jx == pytest.approx(high.jx, rel=1e-6)
        assert low.jy2 == pytest.approx(high.jy2, rel=1e-6)
        assert low.jz2 == pytest.approx(high.jz2, rel=1e-6)

    @pytest.mark.parametrize("order", [0, -3, 10])
    def test_rejects_bad_order(self, order):
        with pytest.raises(ValueError):
            delta_mixture(10, 0.0, 0.1, order=order)

    def test_rejects_negative_sigma(self):
        with pytest.raises(ValueError):
            delta_mixture(10, 0.0, -0.1)


class TestDeltaThermalMixture:
    def test_reduces_to_thermal(self):
        n = 30
        combined = ensemble_moments(delta_thermal_mixture(n, 0.5, 0.0, 0.8))
        thermal = ensemble_moments(thermal_ensemble(ModelParams(n, 0.5, 0.0), 0.8))
        assert combined.jx == pytest.approx(thermal.jx, abs=1e-12)
        assert combined.jy2 == pytest.approx(thermal.jy2, abs=1e-12)

    def test_reduces_to_delta_mixture(self):
        n = 30
        combined = ensemble_moments(delta_thermal_mixture(n, -0.6, 0.04, 0.0))
        pure = ensemble_moments(delta_mixture(n, -0.6, 0.04, check=False))
        assert combined.jx == pytest.approx(pure.jx, abs=1e-12)

    def test_combined_weights_normalized(self):
        ens = delta_thermal_mixture(20, -0.4, 0.03, 0.5, order=11)
        assert np.sum(ens.weights) == pytest.approx(1.0, abs=1e-12)

    def test_both_channels_degrade_more(self):
        n = 60
        lam = -0.9

        def b_of(ens):
            m = ensemble_moments(ens)
            return bell_witness(phase_squeezing(m, n), visibility(m, n))

        b_t = b_of(delta_thermal_mixture(n, lam, 0.0, 0.3))
        b_d = b_of(delta_thermal_mixture(n, lam, 0.03, 0.0, order=21))
        b_both = b_of(delta_thermal_mixture(n, lam, 0.03, 0.3, order=21))
        assert b_both > max(b_t, b_d)


class TestBlur:
    def test_identity_at_zero(self):
        assert blur_visibility(0.8, 2.0, 0.0) == 0.8

    def test_closed_form(self):
        assert blur_visibility(1.0, 2.0, 0.5) == pytest.approx(
            math.exp(-0.5), abs=1e-15
        )

    def test_composition(self):
        # two blurs compose by adding variances
        one = blur_visibility(blur_visibility(0.9, 1.5, 0.2), 1.5, 0.3)
        both = blur_visibility(0.9, 1.5, math.sqrt(0.04 + 0.09))
        assert one == pytest.approx(both, abs=1e-12)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            blur_visibility(1.2, 1.0, 0.1)

    def test_witness_with_noise_reduces(self):
        assert witness_with_noise(0.4, 1.0) == bell_witness(0.4, 1.0)
        # blur can close the witness region
        nu = blur_visibility(1.0, 2.0, 0.6)
        assert witness_with_noise(0.4, nu) > witness_with_noise(0.4, 1.0)
