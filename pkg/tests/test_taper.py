"""Tests for taper construction and squared-taper transforms."""

import numpy as np
import pytest

from specvar import (
    DomainError,
    InvalidParameterError,
    h2_dft,
    h2_dft_grid,
    h2_integral_approx,
    inflation_factor,
    inflation_factor_limit,
    make_rectangular_taper,
    make_split_cosine_taper,
)

ALL_P = (0.0, 0.2, 0.5, 1.0)


def test_rectangular_is_all_ones():
    taper = make_split_cosine_taper(0.0, 8)
    assert taper.kind == "rectangular"
    assert np.array_equal(taper.values, np.ones(8))


def test_full_cosine_midpoint_is_one():
    # n = 4 samples the shape at x = 0.125, 0.375, 0.625, 0.875; the two
    # central samples of the p = 1 taper sit symmetric around the peak
    taper = make_split_cosine_taper(1.0, 5)
    assert taper.values[2] == pytest.approx(1.0, abs=1e-15)  # x = 0.5 exactly


def test_half_taper_edge_value():
    # p = 0.5 at x = 0.125: (1 - cos(pi/2)) / 2 = 1/2
    taper = make_split_cosine_taper(0.5, 4)
    assert taper.values[0] == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("p", (-0.1, 1.5))
def test_invalid_fraction_rejected(p):
    with pytest.raises(InvalidParameterError):
        make_split_cosine_taper(p, 16)


def test_short_taper_rejected():
    with pytest.raises(InvalidParameterError):
        make_split_cosine_taper(0.5, 1)


@pytest.mark.parametrize("p", ALL_P)
@pytest.mark.parametrize("n", (2, 7, 64, 255))
def test_taper_invariants(p, n):
    taper = make_split_cosine_taper(p, n)
    values = taper.values
    assert values.size == n
    assert np.all(values >= 0.0) and np.all(values <= 1.0 + 1e-12)
    assert np.allclose(values, values[::-1], atol=1e-12)
    assert taper.sum_h2 > 0.0


def test_inflation_rectangular_is_one():
    for n in (2, 17, 512):
        assert inflation_factor(make_rectangular_taper(n)) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize(
    "p,limit",
    [(0.2, 1.1163), (0.5, 1.3471), (1.0, 35.0 / 18.0)],
)
def test_inflation_approaches_closed_form_limit(p, limit):
    assert inflation_factor_limit(p) == pytest.approx(limit, abs=5e-5)
    assert inflation_factor(make_split_cosine_taper(p, 1024)) == pytest.approx(limit, abs=1e-2)
    # O(1/n) convergence: quadruple n, error should not grow
    err_1k = abs(inflation_factor(make_split_cosine_taper(p, 1024)) - inflation_factor_limit(p))
    err_4k = abs(inflation_factor(make_split_cosine_taper(p, 4096)) - inflation_factor_limit(p))
    assert err_4k <= err_1k + 1e-12


@pytest.mark.parametrize("p", ALL_P)
def test_inflation_at_least_one_with_equality_iff_constant(p):
    for n in (2, 5, 33, 128):
        taper = make_split_cosine_taper(p, n)
        c_h = inflation_factor(taper)
        assert c_h >= 1.0 - 1e-12
        if np.ptp(taper.values) < 1e-12:
            assert c_h == pytest.approx(1.0, abs=1e-14)
        else:
            assert c_h > 1.0 + 1e-12


def test_h2_at_zero_is_mean_square():
    taper = make_split_cosine_taper(0.5, 64)
    value = h2_dft(taper, 0.0, 1.0)
    assert value.imag == 0.0
    assert value.real == pytest.approx(np.mean(taper.values**2), rel=1e-14)


def test_h2_rectangular_vanishes_at_fourier_frequencies():
    taper = make_rectangular_taper(64)
    for ell in (1, 5, 31, 63):
        assert abs(h2_dft(taper, ell / 64.0, 1.0)) <= 1e-12


@pytest.mark.parametrize("p", ALL_P)
def test_h2_bounded_by_value_at_zero(p):
    taper = make_split_cosine_taper(p, 128)
    f = np.linspace(0.0, 1.0, 257)
    mags = np.abs(h2_dft(taper, f, 1.0))
    assert np.all(mags <= h2_dft(taper, 0.0, 1.0).real + 1e-14)


def test_h2_conjugate_symmetry():
    taper = make_split_cosine_taper(0.3, 96)
    delta = 0.5
    for f in (0.13, 0.61, 0.97):
        left = h2_dft(taper, 1.0 / delta - f, delta)
        right = np.conj(h2_dft(taper, f, delta))
        assert left == pytest.approx(right, abs=1e-14)


@pytest.mark.parametrize("p", (0.0, 0.5))
@pytest.mark.parametrize("nprime", (32, 64, 96, 128))
def test_h2_grid_matches_direct_sum(p, nprime):
    taper = make_split_cosine_taper(p, 64)
    grid = h2_dft_grid(taper, nprime)
    direct = h2_dft(taper, np.arange(nprime) / nprime, 1.0)
    scale = np.abs(direct).max()
    assert np.max(np.abs(grid - direct)) <= 1e-10 * scale


@pytest.mark.parametrize("p", (0.2, 0.5))
@pytest.mark.parametrize("nprime_factor", (1, 2))
def test_squared_taper_parseval(p, nprime_factor):
    # sum over all grid bins of |H2|^2 equals (N'/N) * sum(h^4) / N exactly
    n = 256
    taper = make_split_cosine_taper(p, n)
    nprime = nprime_factor * n
    total = float(np.sum(np.abs(h2_dft_grid(taper, nprime)) ** 2))
    expected = (nprime / n) * taper.sum_h4 / n
    assert total == pytest.approx(expected, rel=1e-10)


def test_h2_decay_bound_constant_is_stable():
    """|H2(f)| <= c / (N * dist(f*delta, Z)) with c fitted at n=256.

    The distance to the nearest integer of f*delta is the right abscissa for
    f up to 1/delta because H2 is 1/delta-periodic.
    """
    for p in (0.2, 0.5, 1.0):
        fitted = {}
        for n in (256, 1024):
            taper = make_split_cosine_taper(p, n)
            nprime = 2 * n
            h2 = np.abs(h2_dft_grid(taper, nprime))[1:]
            lam = np.arange(1, nprime) / nprime
            folded = np.minimum(lam, 1.0 - lam)
            folded[folded == 0.0] = np.inf
            fitted[n] = np.max(n * folded * h2)
        assert fitted[1024] <= 1.01 * fitted[256], (p, fitted)


def test_integral_approx_at_zero_matches_shape_integral():
    for p in ALL_P:
        value = h2_integral_approx(p, 0.0, 256, 1.0)
        assert value == pytest.approx(1.0 - 5.0 * p / 8.0, abs=1e-14)


def test_integral_approx_rectangular_zeros():
    # the rectangular case reduces to a sinc with zeros at f = l/(n*delta)
    for ell in (1, 4, 100):
        assert abs(h2_integral_approx(0.0, ell / 256.0, 256, 1.0)) <= 1e-14


def test_integral_approx_domain_error():
    with pytest.raises(DomainError):
        h2_integral_approx(0.5, 0.7, 128, 1.0)
    with pytest.raises(DomainError):
        h2_integral_approx(0.5, 1.2, 128, 0.5)


@pytest.mark.parametrize("p", ALL_P)
def test_closed_form_matches_quadrature(p):
    lams = (0.0, 0.001, 0.125, 0.37, 0.5)
    closed = h2_integral_approx(p, lams, 512, 1.0, method="closed_form")
    quadr = h2_integral_approx(p, lams, 512, 1.0, method="quadrature")
    assert np.max(np.abs(closed - quadr)) <= 1e-11


@pytest.mark.parametrize("p", (0.2, 0.5))
def test_integral_approx_error_bounded_and_decaying(p):
    """The approximation error stays below c/n and shrinks when n doubles."""
    lam = np.arange(0.0, 0.5 + 1e-12, 1e-3)
    errs = {}
    for n in (512, 1024):
        taper = make_split_cosine_taper(p, n)
        errs[n] = np.max(np.abs(h2_dft(taper, lam, 1.0) - h2_integral_approx(p, lam, n, 1.0)))
    assert errs[512] <= 10.0 / 512
    assert errs[1024] < errs[512]


def test_integral_approx_tracks_dft_within_c_over_n():
    # single-frequency variant: error within a modest multiple of 1/n
    n = 1024
    taper = make_split_cosine_taper(0.5, n)
    f = 1.0 / n
    diff = abs(h2_dft(taper, f, 1.0) - h2_integral_approx(0.5, f, n, 1.0))
    assert diff <= 5.0 / n
