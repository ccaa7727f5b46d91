"""Tests for process models, autocovariances, and exact simulation."""

import numpy as np
import pytest

from specvar import (
    DomainError,
    InvalidParameterError,
    ModelError,
    ar4_process,
    ar_process,
    autocovariances,
    simulate,
    simulate_batch,
    spectral_density,
    spectral_peaks,
    white_noise,
)

# located by 1e-5 grid search over the closed-form spectrum; regression values
AR4_PEAKS = ((0.11022, 23427.48525336583), (0.13964, 16580.29756214337))


def test_white_noise_spectrum_flat():
    model = white_noise(sigma2=1.0, delta=1.0)
    f = np.linspace(0.0, 0.5, 11)
    assert np.all(spectral_density(model, f) == 1.0)


def test_white_noise_spectrum_scales_with_delta():
    model = white_noise(sigma2=2.0, delta=0.25)
    assert spectral_density(model, 1.0) == pytest.approx(0.5)


def test_ar1_spectrum_at_zero():
    model = ar_process([0.5])
    assert spectral_density(model, 0.0) == pytest.approx(4.0, rel=1e-14)


def test_spectrum_domain_error():
    model = white_noise()
    with pytest.raises(DomainError):
        spectral_density(model, 0.6)
    with pytest.raises(DomainError):
        spectral_density(model, -0.1)


def test_unstable_model_rejected():
    with pytest.raises(ModelError):
        ar_process([1.0])
    with pytest.raises(ModelError):
        ar_process([0.4, 0.7])
    with pytest.raises(ModelError):
        white_noise(sigma2=0.0)
    with pytest.raises(ModelError):
        white_noise(delta=-1.0)


def test_ar4_is_stable():
    assert ar4_process().order == 4


def test_white_noise_autocovariances():
    acov = autocovariances(white_noise(sigma2=3.0), 5)
    assert acov[0] == 3.0
    assert np.all(acov[1:] == 0.0)


def test_ar1_autocovariances_closed_form():
    phi, sigma2 = 0.5, 1.0
    acov = autocovariances(ar_process([phi], sigma2=sigma2), 8)
    expected = sigma2 / (1.0 - phi**2) * phi ** np.arange(9)
    assert np.max(np.abs(acov - expected)) <= 1e-14
    assert acov[0] == pytest.approx(4.0 / 3.0, rel=1e-14)


def test_autocovariance_decay_and_bound():
    acov = autocovariances(ar4_process(), 4096)
    assert np.all(np.abs(acov[1:]) <= acov[0])
    # geometric decay for a stable model
    assert np.max(np.abs(acov[3000:])) < 1e-10 * acov[0]


def test_ar4_autocovariances_match_spectrum_transform():
    """Yule-Walker values vs. the inverse transform of the closed-form spectrum.

    The oracle inverts S on a 2^18 grid; the absolute floor excuses only the
    zero crossings of the oscillating sequence, where pointwise relative
    error is unbounded (|s_tau| there is below 1e-7 while s_0 is 762).
    """
    model = ar4_process()
    k = 2**18
    head = autocovariances(model, 1023)
    spectrum = spectral_density(model, np.arange(k // 2 + 1) / k)
    oracle = np.fft.irfft(spectrum, n=k)[:1024]
    np.testing.assert_allclose(head, oracle, rtol=1e-6, atol=1e-10 * head[0])


def test_spectral_reconstruction_converges():
    """Truncated cosine series over the autocovariances approaches S(f)."""
    model = ar4_process()
    fgrid = np.linspace(0.0, 0.5, 501)
    away = np.ones_like(fgrid, dtype=bool)
    for peak_f, _ in spectral_peaks(model):
        away &= np.abs(fgrid - peak_f) > 0.02
    target = spectral_density(model, fgrid)

    def max_rel_err(t):
        acov = autocovariances(model, t)
        tau = np.arange(1, t + 1)
        recon = acov[0] + 2.0 * np.cos(2.0 * np.pi * np.outer(fgrid, tau)) @ acov[1:]
        return np.max(np.abs(recon - target)[away] / target[away])

    errs = [max_rel_err(t) for t in (512, 1024, 2048)]
    assert errs[1] <= 1e-3
    assert errs[0] > errs[1] > errs[2]


def test_ar4_spectrum_has_two_sharp_peaks():
    peaks = spectral_peaks(ar4_process())
    assert len(peaks) == 2
    for (f, height), (f_ref, h_ref) in zip(peaks, AR4_PEAKS):
        assert f == pytest.approx(f_ref, abs=2e-5)
        assert height == pytest.approx(h_ref, rel=1e-6)
    # sharp: tens of dB above the spectrum floor
    floor = spectral_density(ar4_process(), 0.4)
    assert 10 * np.log10(peaks[0][1] / floor) > 30


def test_simulation_is_deterministic():
    model = ar4_process()
    a = simulate(model, 128, seed=99)
    b = simulate(model, 128, seed=99)
    assert np.array_equal(a.samples, b.samples)
    c = simulate(model, 128, seed=100)
    assert not np.array_equal(a.samples, c.samples)


def test_simulation_rejects_bad_length():
    with pytest.raises(InvalidParameterError):
        simulate(white_noise(), 0, seed=1)


def test_white_noise_marginals():
    model = white_noise(sigma2=1.0, mu=2.0)
    draws = simulate_batch(model, 4, 50_000, seed=3)
    assert draws.shape == (50_000, 4)
    assert draws.mean() == pytest.approx(2.0, abs=0.02)
    assert draws.var() == pytest.approx(1.0, abs=0.02)


def test_ar4_lag1_autocovariance_monte_carlo():
    """Mean sample lag-1 autocovariance within 3 MC standard errors of s_1."""
    model = ar4_process()
    n, reps = 1024, 2000
    draws = simulate_batch(model, n, reps, seed=11)
    # unbiased under the known zero mean
    lag1 = np.sum(draws[:, :-1] * draws[:, 1:], axis=1) / (n - 1)
    s1 = autocovariances(model, 1)[1]
    se = lag1.std(ddof=1) / np.sqrt(reps)
    assert abs(lag1.mean() - s1) <= 3.0 * se


def test_toeplitz_covariance_positive_definite_at_scale():
    # the factorization inside simulate() must succeed at n=1024
    ts = simulate(ar4_process(), 1024, seed=0)
    assert ts.n == 1024
    assert np.all(np.isfinite(ts.samples))
