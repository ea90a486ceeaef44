"""Tests for the DFT combiner, noise predictions, and the CBC Monte Carlo."""

import math

import numpy as np
import pytest

from cbcnoise import (
    CbcConfig,
    RngStream,
    SmallAngleWarning,
    dft,
    error_photon_number,
    error_signals,
    gamma_sum_statistics,
    inverse_dft,
    predict_output,
    simulate_cbc,
    sql_phase_variance,
    xi_threshold,
)
from cbcnoise.combining import chunk_trials, combine_port_amplitude

# Forward transform of [1+2j, -1, 0.5j, 2-1j], computed from the O(N^2)
# definition sum_j a_j exp(-2 pi i j k / N) / sqrt(N) with plain cmath.
_DFT4_IN = np.array([1 + 2j, -1 + 0j, 0.5j, 2 - 1j])
_DFT4_OUT = np.array([1 + 0.75j, 1 + 2.25j, 1.75j, -0.75j])


def test_dft_frozen_reference():
    np.testing.assert_allclose(dft(_DFT4_IN), _DFT4_OUT, atol=1e-14)


def test_dft_matches_numpy_fft_convention():
    gen = np.random.default_rng(21)
    for n in (2, 5, 16):
        a = gen.normal(size=n) + 1j * gen.normal(size=n)
        np.testing.assert_allclose(dft(a), np.fft.fft(a) / math.sqrt(n), atol=1e-12)
        np.testing.assert_allclose(inverse_dft(a), np.fft.ifft(a) * math.sqrt(n), atol=1e-12)


def test_dft_hand_values():
    np.testing.assert_allclose(dft([1, 1, 1, 1]), [2, 0, 0, 0], atol=1e-14)
    np.testing.assert_allclose(dft([1, -1]), [0, math.sqrt(2)], atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 8, 17, 64])
def test_dft_unitarity(n):
    gen = np.random.default_rng(n)
    a = gen.normal(size=n) + 1j * gen.normal(size=n)
    f = dft(a)
    assert np.sum(np.abs(f) ** 2) == pytest.approx(np.sum(np.abs(a) ** 2), rel=1e-13)
    np.testing.assert_allclose(inverse_dft(f), a, atol=1e-12)


def test_dft_rejects_empty():
    with pytest.raises(ValueError):
        dft([])


def test_combine_port_amplitude():
    # matched beams put sqrt(N) times the common amplitude into port zero
    a = np.full(4, 3.0 + 0j)
    assert combine_port_amplitude(a) == pytest.approx(6.0)
    gen = np.random.default_rng(2)
    b = gen.normal(size=8) + 1j * gen.normal(size=8)
    assert combine_port_amplitude(b) == pytest.approx(math.sqrt(8) * b.mean(), rel=1e-12)


def test_error_signals_hand_case():
    np.testing.assert_allclose(error_signals([1, 1j]), [0.5 - 0.5j, -0.5 + 0.5j], atol=1e-14)


def test_error_signals_subtract_the_mean():
    gen = np.random.default_rng(31)
    a = gen.normal(size=17) + 1j * gen.normal(size=17)
    np.testing.assert_allclose(error_signals(a), a - a.mean(), atol=1e-12)
    # single beam has no relative error
    np.testing.assert_allclose(error_signals([2 + 3j]), [0], atol=1e-14)


def test_error_photon_number_two_beam():
    # quadratic budget for two beams at +-0.1 is n * (0.1^2 + 0.1^2)
    value = error_photon_number([0.1, -0.1], 100.0)
    assert value == pytest.approx(2.0, rel=1e-12)
    # and it tracks the true error-port intensity 2 n sin^2(0.1) to quartic order
    exact = np.sum(np.abs(error_signals(10.0 * np.exp(1j * np.array([0.1, -0.1])))) ** 2)
    assert exact == pytest.approx(1.9933422158758374, rel=1e-12)
    assert value == pytest.approx(exact, rel=5e-3)


def test_sql_and_threshold_values():
    assert sql_phase_variance(2, 100) == pytest.approx(0.01)
    assert sql_phase_variance(2, 1000) == pytest.approx(1e-3)
    assert sql_phase_variance(5, 1000) == pytest.approx(2.5e-4)
    assert xi_threshold(2) == 0.5
    assert xi_threshold(3) == 2.0
    assert xi_threshold(11) == 50.0
    with pytest.raises(ValueError):
        sql_phase_variance(1, 100)


def test_config_resolves_xi_and_phase_var():
    c = CbcConfig(n_beams=4, photons=1000, xi=3.0)
    assert c.phase_var == pytest.approx(3.0 * sql_phase_variance(4, 1000))
    d = CbcConfig(n_beams=4, photons=1000, phase_var=c.phase_var)
    assert d.xi == pytest.approx(3.0)


def test_config_validation():
    with pytest.raises(ValueError):
        CbcConfig(n_beams=2, photons=100)  # neither given
    with pytest.raises(ValueError):
        CbcConfig(n_beams=2, photons=100, phase_var=0.01, xi=1.0)  # both given
    with pytest.raises(ValueError):
        CbcConfig(n_beams=2, photons=100, xi=0.5)  # below the quantum limit


def test_large_phase_variance_warns():
    with pytest.warns(SmallAngleWarning):
        CbcConfig(n_beams=2, photons=100, phase_var=0.2)


def test_small_phase_variance_does_not_warn():
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        CbcConfig(n_beams=2, photons=100, phase_var=0.01)


def test_predict_output_hand_point():
    # N=2, n=4, xi=1 puts Var(psi) at 0.25, far outside the small-angle
    # regime, which is exactly why it makes a good arithmetic check
    with pytest.warns(SmallAngleWarning):
        cfg = CbcConfig(n_beams=2, photons=4, xi=1.0)
    pred = predict_output(cfg)
    assert pred.mean_amplitude == pytest.approx(2.4748737341529163, rel=1e-12)
    assert pred.var_x == pytest.approx(0.375, rel=1e-12)
    assert pred.var_p == pytest.approx(1.25, rel=1e-12)
    assert pred.excess_x == pytest.approx(0.125, rel=1e-12)
    assert pred.excess_p == pytest.approx(1.0, rel=1e-12)
    assert pred.var_x_units == pytest.approx(1.5, rel=1e-12)
    assert pred.var_p_units == pytest.approx(5.0, rel=1e-12)


def test_simulator_matches_exact_gaussian_moments():
    """Check the Monte Carlo against closed-form moments with no small-angle step.

    For iid Gaussian phases the output moments fold exactly:
    mean_x = sqrt(N n) exp(-V/2), var_x = 1/4 + n ((1 + exp(-2V))/2 - exp(-V)),
    var_p = 1/4 + n (1 - exp(-2V))/2.  At V = 0.05 the quadratic expansion is
    visibly off, so this pins down the sampler rather than the expansion.
    """
    cfg = CbcConfig(n_beams=2, photons=100, phase_var=0.05)
    stats = simulate_cbc(cfg, 400_000, RngStream(19))
    exact_mean = 13.792965051073782
    exact_var_x = 0.3689284517265743
    exact_var_p = 5.008129098202025
    assert abs(stats.mean_x - exact_mean) < 5 * stats.se_mean_x
    assert abs(stats.var_x - exact_var_x) < 5 * stats.se_var_x
    assert abs(stats.var_p - exact_var_p) < 5 * stats.se_var_p
    assert abs(stats.mean_p) < 5 * stats.se_mean_p


@pytest.mark.parametrize("n_beams", [2, 4])
def test_simulator_matches_prediction_in_small_angle_regime(n_beams):
    # at xi = 1 and n = 1000 the phase variance is small enough that the
    # quadratic prediction and the exact moments agree to well under 1 SE
    cfg = CbcConfig(n_beams=n_beams, photons=1000, xi=1.0)
    pred = predict_output(cfg)
    stats = simulate_cbc(cfg, 100_000, RngStream(23))
    assert abs(stats.mean_x - pred.mean_amplitude) < 5 * stats.se_mean_x
    assert abs(stats.var_x - pred.var_x) < 5 * stats.se_var_x
    assert abs(stats.var_p - pred.var_p) < 5 * stats.se_var_p


def test_simulate_cbc_deterministic():
    cfg = CbcConfig(n_beams=3, photons=50, xi=2.0)
    a = simulate_cbc(cfg, 30_000, RngStream(4))
    b = simulate_cbc(cfg, 30_000, RngStream(4))
    assert a == b


def test_phase_noise_is_asymmetric_between_quadratures():
    # the p-quadrature excess is larger than the x excess by about 2/V;
    # a sizable V is needed to resolve the tiny x excess, hence the warning
    with pytest.warns(SmallAngleWarning):
        cfg = CbcConfig(n_beams=2, photons=10, xi=1.0)
    assert cfg.phase_var == pytest.approx(0.1)
    stats = simulate_cbc(cfg, 2_000_000, RngStream(29))
    ratio = (stats.var_p - 0.25) / (stats.var_x - 0.25)
    assert ratio == pytest.approx(2.0 / cfg.phase_var, rel=0.05)


def test_gamma_sum_statistics():
    n_terms, phase_var, trials = 10, 0.01, 200_000
    mean, var = gamma_sum_statistics(n_terms, phase_var, trials, RngStream(37))
    target_mean = n_terms * phase_var
    target_var = 2 * n_terms * phase_var ** 2
    se_mean = math.sqrt(target_var / trials)
    se_var = target_var * math.sqrt((2 + 12 / n_terms) / trials)
    assert abs(mean - target_mean) < 5 * se_mean
    assert abs(var - target_var) < 5 * se_var


def test_chunk_trials_bounds():
    # wide per-trial records get smaller chunks, never below 1024 trials
    assert chunk_trials(1) == 65536
    assert chunk_trials(6) == 65536
    assert chunk_trials(100) == 2 ** 21 // 100
    assert chunk_trials(10_000) == 1024
