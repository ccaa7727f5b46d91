"""Relative variances of smoothed tapered spectral estimates.

Three routes to the variance of the smoothed estimate divided by the squared
target, all for grid indices away from 0 and the Nyquist index:

* ``usual_rel_variance``: the classical inflation-factor approximation
  ``C_h * (N'/N) * sum(g^2)``, valid when many frequencies are smoothed.
* ``new_rel_variance``: an approximation that keeps track of how strongly
  neighboring periodogram values are correlated through the squared-taper
  transform, so it stays accurate for small smoothing spans.
* ``exact_rel_variance``: the exact value for a Gaussian process, assembled
  from pairwise periodogram covariances computed from the autocovariance
  sequence.  Direct evaluation costs O(N^2) per frequency pair and O(N^3)
  for a full grid; ``accelerated_exact_cov_grid`` produces identical numbers
  with a single two-dimensional FFT.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateSpectrumError,
    EdgeFrequencyError,
    InvalidParameterError,
)
from .estimator import SmoothingScheme, grid_frequency, window_indices
from .process import ProcessModel, autocovariances, spectral_density
from .taper import Taper, h2_dft, h2_dft_grid, inflation_factor

__all__ = [
    "VarianceTable",
    "RelCovarianceGrid",
    "usual_rel_variance",
    "new_rel_variance",
    "approx_rel_covariance",
    "exact_gaussian_rel_covariance",
    "direct_cov_grid",
    "accelerated_exact_cov_grid",
    "exact_rel_variance",
    "exact_rel_variance_grid",
    "variance_table",
    "default_threads",
]


def default_threads() -> int:
    """Worker count for frequency-sharded loops (``SPECVAR_THREADS``, default 1)."""
    raw = os.environ.get("SPECVAR_THREADS", "1")
    try:
        threads = int(raw)
    except ValueError as exc:
        raise InvalidParameterError(f"SPECVAR_THREADS must be an integer, got {raw!r}") from exc
    if threads < 1:
        raise InvalidParameterError(f"SPECVAR_THREADS must be >= 1, got {threads}")
    return threads


def usual_rel_variance(taper: Taper, scheme: SmoothingScheme) -> float:
    """Classical approximation ``C_h * (N'/N) * sum(g_r^2)``.

    Independent of the grid index; valid away from indices 0 and ``N'/2``.
    """
    return float(
        inflation_factor(taper) * (scheme.nprime / taper.n) * np.sum(scheme.weights**2)
    )


def new_rel_variance(taper: Taper, scheme: SmoothingScheme) -> float:
    """Smoothing-span-aware approximation of the relative variance.

    Adds to ``sum(g_r^2)`` the contribution of correlations between
    periodogram values ``l`` grid steps apart, weighted by
    ``|H2(f_{N',l})|^2 / H2(0)^2`` where ``H2`` is the normalized DFT of the
    squared taper.  Agrees with the raw-periodogram value 1 at ``M = 0`` and
    approaches the classical approximation as ``M`` grows.  The grid phases
    depend only on ``l / N'``, so the result is independent of the sampling
    interval.
    """
    m = scheme.m
    g = scheme.weights
    # lag-l weight autocorrelations: sum_r g_r g_{r+l} at index 2m + l
    autocorr = np.correlate(g, g, mode="full")
    if m == 0:
        return float(autocorr[0])
    h2 = h2_dft_grid(taper, scheme.nprime)
    ratios = np.abs(h2[1 : 2 * m + 1]) ** 2 / h2[0].real ** 2
    return float(autocorr[2 * m] + 2.0 * (ratios @ autocorr[2 * m + 1 :]))


def _check_interior(f: float, nyquist: float, label: str):
    if f <= 0.0 or f >= nyquist:
        raise EdgeFrequencyError(
            f"{label}={f} must lie strictly between 0 and the Nyquist frequency {nyquist}"
        )


def approx_rel_covariance(taper: Taper, f: float, g: float, delta: float = 1.0) -> float:
    """Asymptotic relative covariance of tapered periodogram values.

    ``(|H2(f-g)|^2 + |H2(f+g)|^2) / H2(0)^2`` for frequencies strictly
    between 0 and Nyquist.  Symmetric in ``f`` and ``g``.
    """
    nyq = 0.5 / delta
    _check_interior(f, nyq, "f")
    _check_interior(g, nyq, "g")
    h2_zero = h2_dft(taper, 0.0, delta).real
    return float(
        (np.abs(h2_dft(taper, f - g, delta)) ** 2 + np.abs(h2_dft(taper, f + g, delta)) ** 2)
        / h2_zero**2
    )


def _pair_cov(
    cov_matrix: np.ndarray,
    h: np.ndarray,
    t: np.ndarray,
    delta: float,
    sum_h2: float,
    f: float,
    sf: float,
    g: float,
    sg: float,
) -> float:
    """Exact Gaussian relative covariance for one frequency pair.

    Evaluates the double sums ``T = sum_{j,k} h_j h_k s_{j-k}
    e^{-i2pi(fj -+ gk)delta}`` through one Toeplitz matrix-vector product;
    cost O(N^2) per call.
    """
    u = h * np.exp(-2j * np.pi * f * t * delta)
    v = h * np.exp(-2j * np.pi * g * t * delta)
    w = cov_matrix @ v
    t_minus = u @ np.conj(w)
    t_plus = u @ w
    return float(
        (np.abs(t_minus) ** 2 + np.abs(t_plus) ** 2) * delta**2 / (sf * sg * sum_h2**2)
    )


def exact_gaussian_rel_covariance(model: ProcessModel, taper: Taper, f: float, g: float) -> float:
    """Exact relative covariance of tapered periodogram values at ``f`` and ``g``.

    Valid for Gaussian processes with a known mean.  The ``delta**2`` factor
    makes the expression the covariance of the interval-scaled periodogram
    for any sampling interval; for white noise the result coincides with
    :func:`approx_rel_covariance` identically.
    """
    n = taper.n
    sf = spectral_density(model, f)
    sg = spectral_density(model, g)
    if sf <= 0.0 or sg <= 0.0:
        raise DegenerateSpectrumError("spectral density must be positive at f and g")
    cov_matrix = scipy.linalg.toeplitz(autocovariances(model, n - 1))
    t = np.arange(1, n + 1)
    return _pair_cov(
        cov_matrix, taper.values, t, model.delta, taper.sum_h2, f, sf, g, sg
    )


@dataclass(frozen=True)
class RelCovarianceGrid:
    """Relative periodogram covariances for all grid pairs within a band.

    ``band[d, i]`` holds the covariance of the pair ``(f_i, f_{i+d})`` for
    offsets ``d = 0 .. 2M`` and ``i + d <= nprime / 2``; entries outside the
    band are NaN.  Built once, then consumed read-only.
    """

    nprime: int
    m: int
    delta: float
    band: np.ndarray
    method: str

    @property
    def half(self) -> int:
        return self.nprime // 2

    def cov(self, i: int, j: int) -> float:
        d = abs(i - j)
        if d > 2 * self.m:
            raise InvalidParameterError(
                f"pair ({i}, {j}) outside the cached band of width {2 * self.m}"
            )
        lo = min(i, j)
        if not 0 <= lo <= self.half - d:
            raise InvalidParameterError(f"pair ({i}, {j}) outside the grid")
        return float(self.band[d, lo])


def _grid_spectrum(model: ProcessModel, nprime: int) -> np.ndarray:
    freqs = grid_frequency(nprime, model.delta, np.arange(nprime // 2 + 1))
    s = spectral_density(model, freqs)
    if np.any(s <= 0.0):
        raise DegenerateSpectrumError("spectral density must be positive on the grid")
    return s


def direct_cov_grid(
    model: ProcessModel, taper: Taper, nprime: int, m: int, threads: int | None = None
) -> RelCovarianceGrid:
    """Banded covariance grid by direct per-pair double sums.

    Each of the O(N' M) unordered pairs costs O(N^2); the whole grid is the
    O(N^3) reference path.  ``threads`` shards the work over frequency
    columns (default ``SPECVAR_THREADS``); results are written to disjoint
    slots, so the output is independent of the thread count.
    """
    if int(nprime) != nprime or nprime < 2 or nprime % 2:
        raise InvalidParameterError(f"grid size must be a positive even integer, got {nprime}")
    if int(m) != m or m < 0:
        raise InvalidParameterError(f"band half-width must be a non-negative integer, got {m}")
    nprime, m = int(nprime), int(m)
    half = nprime // 2
    n = taper.n
    delta = model.delta
    s_grid = _grid_spectrum(model, nprime)
    cov_matrix = scipy.linalg.toeplitz(autocovariances(model, n - 1))
    t = np.arange(1, n + 1)
    h = taper.values
    sum_h2 = taper.sum_h2
    freqs = grid_frequency(nprime, delta, np.arange(half + 1))

    band = np.full((2 * m + 1, half + 1), np.nan)

    def fill(i: int):
        for d in range(0, 2 * m + 1):
            j = i + d
            if j > half:
                break
            band[d, i] = _pair_cov(
                cov_matrix, h, t, delta, sum_h2, freqs[i], s_grid[i], freqs[j], s_grid[j]
            )

    workers = default_threads() if threads is None else int(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, range(half + 1)))
    else:
        for i in range(half + 1):
            fill(i)
    return RelCovarianceGrid(nprime=nprime, m=m, delta=delta, band=band, method="direct")


def accelerated_exact_cov_grid(
    model: ProcessModel, taper: Taper, nprime: int, m: int
) -> RelCovarianceGrid:
    """Banded covariance grid through one two-dimensional FFT.

    Zero-pads the matrix ``h_a h_b s_{a-b}`` to ``nprime x nprime`` and reads
    every needed double sum off its transform: with ``C[i, j]`` the 2-d DFT,
    the sum with opposite phase signs is ``C[-i mod N', j]`` and the one with
    equal signs is ``C[i, j]``.  Matches :func:`direct_cov_grid` to rounding
    error at a small fraction of the cost.
    """
    if int(nprime) != nprime or nprime < 2 or nprime % 2:
        raise InvalidParameterError(f"grid size must be a positive even integer, got {nprime}")
    if int(m) != m or m < 0:
        raise InvalidParameterError(f"band half-width must be a non-negative integer, got {m}")
    nprime, m = int(nprime), int(m)
    half = nprime // 2
    n = taper.n
    delta = model.delta
    s_grid = _grid_spectrum(model, nprime)
    acov = autocovariances(model, n - 1)
    h = taper.values

    outer = np.outer(h, h) * scipy.linalg.toeplitz(acov)
    padded = np.zeros((nprime, nprime))
    idx = np.arange(1, n + 1) % nprime
    if nprime >= n:
        padded[np.ix_(idx, idx)] = outer
    else:
        # indices alias mod nprime; fold the matrix into the shared bins
        np.add.at(padded, (idx[:, None], idx[None, :]), outer)
    spec2d = np.fft.rfft2(padded)  # shape (nprime, half + 1)

    scale = delta**2 / taper.sum_h2**2
    band = np.full((2 * m + 1, half + 1), np.nan)
    for d in range(0, 2 * m + 1):
        i = np.arange(0, half + 1 - d)
        j = i + d
        t_plus = spec2d[i, j]
        t_minus = spec2d[(nprime - i) % nprime, j]
        band[d, : i.size] = (
            (np.abs(t_minus) ** 2 + np.abs(t_plus) ** 2) * scale / (s_grid[i] * s_grid[j])
        )
    return RelCovarianceGrid(nprime=nprime, m=m, delta=delta, band=band, method="fft")


def exact_rel_variance(
    model: ProcessModel,
    taper: Taper,
    scheme: SmoothingScheme,
    k: int,
    cov: RelCovarianceGrid | None = None,
) -> float:
    """Exact relative variance of the smoothed estimate at grid index ``k``.

    Sums ``g_r g_s`` times the exact pairwise covariances over the smoothing
    window, with indices reflected and the frequency-zero term excluded
    exactly as in the smoothing itself.  Pair covariances are cached per
    unordered index pair; pass a precomputed ``cov`` grid to share work
    across many ``k``.
    """
    idx, weights = window_indices(scheme, k)
    if cov is not None:
        if cov.nprime != scheme.nprime:
            raise InvalidParameterError("covariance grid was built for a different grid size")
        lookup = cov.cov
    else:
        cache: dict[tuple[int, int], float] = {}
        n = taper.n
        cov_matrix = scipy.linalg.toeplitz(autocovariances(model, n - 1))
        t = np.arange(1, n + 1)
        freqs = grid_frequency(scheme.nprime, model.delta, np.arange(scheme.half + 1))
        s_grid = spectral_density(model, freqs)
        if np.any(s_grid[idx] <= 0.0):
            raise DegenerateSpectrumError("spectral density must be positive on the window")

        def lookup(i: int, j: int) -> float:
            key = (min(i, j), max(i, j))
            if key not in cache:
                cache[key] = _pair_cov(
                    cov_matrix,
                    taper.values,
                    t,
                    model.delta,
                    taper.sum_h2,
                    freqs[key[0]],
                    s_grid[key[0]],
                    freqs[key[1]],
                    s_grid[key[1]],
                )
            return cache[key]

    total = 0.0
    for a, (i, wi) in enumerate(zip(idx, weights)):
        total += wi * wi * lookup(i, i)
        for b in range(a + 1, idx.size):
            total += 2.0 * wi * weights[b] * lookup(i, int(idx[b]))
    return float(total)


def exact_rel_variance_grid(
    model: ProcessModel,
    taper: Taper,
    scheme: SmoothingScheme,
    cov: RelCovarianceGrid,
    ks: np.ndarray | None = None,
) -> np.ndarray:
    """Exact relative variances for many grid indices.

    Interior indices (windows that neither reach past the grid ends nor touch
    frequency zero) are assembled with vectorized gathers from the banded
    covariance grid; edge indices fall back to :func:`exact_rel_variance`.
    Defaults to ``k = 1 .. nprime/2 - 1``.
    """
    if cov.nprime != scheme.nprime:
        raise InvalidParameterError("covariance grid was built for a different grid size")
    if scheme.m > cov.m:
        raise InvalidParameterError(
            f"covariance band half-width {cov.m} too small for smoothing half-width {scheme.m}"
        )
    half = scheme.half
    if ks is None:
        ks = np.arange(1, half)
    ks = np.asarray(ks, dtype=int)
    out = np.empty(ks.size)

    m = scheme.m
    g = scheme.weights
    interior = (ks > m) & (ks < half - m)
    if np.any(interior):
        kk = ks[interior]
        acc = np.zeros(kk.size)
        offsets = np.arange(-m, m + 1)
        for a, r in enumerate(offsets):
            for b, s in enumerate(offsets):
                d = abs(r - s)
                lo = kk - max(r, s)
                acc += g[a] * g[b] * cov.band[d, lo]
        out[interior] = acc
    for pos in np.nonzero(~interior)[0]:
        out[pos] = exact_rel_variance(model, taper, scheme, int(ks[pos]), cov=cov)
    return out


@dataclass(frozen=True)
class VarianceTable:
    """Per-frequency comparison of exact and approximate relative variances."""

    k: np.ndarray
    f: np.ndarray
    exact: np.ndarray
    usual: np.ndarray
    new: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        sizes = {self.k.size, self.f.size, self.exact.size, self.usual.size, self.new.size}
        if len(sizes) != 1:
            raise InvalidParameterError("variance table columns must have equal length")
        if np.any(self.exact <= 0.0) or np.any(self.usual <= 0.0) or np.any(self.new <= 0.0):
            raise InvalidParameterError("variance values must be positive")


def variance_table(
    model: ProcessModel,
    taper: Taper,
    scheme: SmoothingScheme,
    cov: RelCovarianceGrid | None = None,
) -> VarianceTable:
    """Exact, classical, and span-aware relative variances at ``k = 1 .. N'/2 - 1``.

    The two approximations are index-independent and repeated down their
    columns.
    """
    if cov is None:
        cov = accelerated_exact_cov_grid(model, taper, scheme.nprime, scheme.m)
    ks = np.arange(1, scheme.half)
    exact = exact_rel_variance_grid(model, taper, scheme, cov, ks)
    usual = usual_rel_variance(taper, scheme)
    new = new_rel_variance(taper, scheme)
    return VarianceTable(
        k=ks,
        f=np.asarray(grid_frequency(scheme.nprime, model.delta, ks)),
        exact=exact,
        usual=np.full(ks.size, usual),
        new=np.full(ks.size, new),
        metadata={
            "process": model.name,
            "n": taper.n,
            "nprime": scheme.nprime,
            "m": scheme.m,
            "taper_p": taper.p,
            "delta": model.delta,
            "cov_method": cov.method,
        },
    )
