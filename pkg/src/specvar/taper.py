"""Data tapers and discrete transforms of the squared taper.

The split cosine taper rises from zero over a fraction ``p/2`` of the record
as a raised cosine, is flat at one in the middle, and falls symmetrically at
the end.  ``p = 0`` gives the rectangular taper (no tapering at all) and
``p = 1`` the full raised-cosine (Hanning) taper.

Besides taper construction this module provides the quantities derived from
the squared taper that drive variance calculations: the variance inflation
factor and the normalized discrete Fourier transform of ``h_t**2``, both
exactly and through its continuous-integral approximation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, InvalidParameterError

__all__ = [
    "Taper",
    "split_cosine_curve",
    "make_split_cosine_taper",
    "make_rectangular_taper",
    "inflation_factor",
    "inflation_factor_limit",
    "h2_dft",
    "h2_dft_grid",
    "h2_integral_approx",
]


@dataclass(frozen=True)
class Taper:
    """Sampled taper weights ``h_1 .. h_N`` plus generating parameters.

    Weights are validated to lie in ``[0, 1]``, be symmetric about the
    midpoint, and carry positive power.  The array is frozen after
    construction so instances are safe to share between threads.
    """

    values: np.ndarray
    kind: str
    p: float

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise InvalidParameterError("taper needs at least 2 samples")
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("taper values must be finite")
        if np.any(values < -1e-12) or np.any(values > 1.0 + 1e-12):
            raise InvalidParameterError("taper values must lie in [0, 1]")
        if not np.sum(values**2) > 0.0:
            raise InvalidParameterError("taper must have positive power")
        if not np.allclose(values, values[::-1], rtol=0.0, atol=1e-12):
            raise InvalidParameterError("taper must be symmetric")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def sum_h2(self) -> float:
        return float(np.sum(self.values**2))

    @property
    def sum_h4(self) -> float:
        return float(np.sum(self.values**4))


def split_cosine_curve(p: float, x) -> np.ndarray:
    """Evaluate the split cosine shape function on ``[0, 1]``.

    ``p = 0`` is defined as the constant 1 (rectangular limit).
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"taper fraction p must be in [0, 1], got {p}")
    x = np.asarray(x, dtype=float)
    if p == 0.0:
        return np.ones_like(x)
    out = np.ones_like(x)
    lo = x <= p / 2.0
    hi = x >= 1.0 - p / 2.0
    out[lo] = 0.5 * (1.0 - np.cos(2.0 * np.pi * x[lo] / p))
    out[hi] = 0.5 * (1.0 - np.cos(2.0 * np.pi * (1.0 - x[hi]) / p))
    return out


def make_split_cosine_taper(p: float, n: int) -> Taper:
    """Split cosine taper of length ``n`` sampled at ``x_t = (2t - 1) / (2n)``.

    Parameters
    ----------
    p : float
        Fraction of the record tapered, in ``[0, 1]``.
    n : int
        Number of samples, at least 2.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"taper fraction p must be in [0, 1], got {p}")
    if int(n) != n or n < 2:
        raise InvalidParameterError(f"taper length must be an integer >= 2, got {n}")
    n = int(n)
    t = np.arange(1, n + 1)
    values = split_cosine_curve(p, (2 * t - 1) / (2.0 * n))
    kind = "rectangular" if p == 0.0 else "split_cosine"
    return Taper(values=values, kind=kind, p=float(p))


def make_rectangular_taper(n: int) -> Taper:
    """All-ones taper of length ``n``."""
    return make_split_cosine_taper(0.0, n)


def inflation_factor(taper: Taper) -> float:
    """Variance inflation factor ``(sum h^4 / N) / (sum h^2 / N)^2``.

    Equals 1 for the rectangular taper and exceeds 1 for any non-constant
    taper (Cauchy-Schwarz).
    """
    n = taper.n
    return (taper.sum_h4 / n) / (taper.sum_h2 / n) ** 2


def inflation_factor_limit(p: float) -> float:
    """Large-N limit of the inflation factor for the split cosine taper.

    Obtained from the closed-form integrals of the shape function:
    ``int h^2 = 1 - 5p/8`` and ``int h^4 = 1 - 93p/128``.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"taper fraction p must be in [0, 1], got {p}")
    return (1.0 - 93.0 * p / 128.0) / (1.0 - 5.0 * p / 8.0) ** 2


def h2_dft(taper: Taper, f, delta: float = 1.0):
    """Normalized DFT of the squared taper, ``(1/N) sum h_t^2 e^{-i2pi t f delta}``.

    Evaluated by direct summation for any finite frequency ``f`` (scalar or
    array).  ``h2_dft(taper, 0)`` is real and equals ``mean(h^2)``.
    """
    f = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(f)):
        raise DomainError("frequency must be finite")
    h2 = taper.values**2
    t = np.arange(1, taper.n + 1)
    phase = np.exp(-2j * np.pi * np.multiply.outer(f, t) * delta)
    out = phase @ h2 / taper.n
    return complex(out) if out.ndim == 0 else out


def h2_dft_grid(taper: Taper, nprime: int) -> np.ndarray:
    """Normalized squared-taper DFT on the grid ``f_{N',l} = l / (N' delta)``.

    Returns the full length-``nprime`` array of complex values for
    ``l = 0 .. nprime - 1``; the result does not depend on the sampling
    interval because only the ratio ``l / nprime`` enters the phases.
    Computed with a zero-padded FFT; agrees with :func:`h2_dft` at the grid
    frequencies to better than 1e-10 relative error.
    """
    if int(nprime) != nprime or nprime < 2:
        raise InvalidParameterError(f"grid size must be an integer >= 2, got {nprime}")
    nprime = int(nprime)
    h2 = taper.values**2
    padded = np.zeros(nprime)
    # index t of the defining sum enters the FFT bin t mod N'
    idx = np.arange(1, taper.n + 1) % nprime
    if nprime >= taper.n:
        padded[idx] = h2
    else:
        np.add.at(padded, idx, h2)
    return np.fft.fft(padded) / taper.n


def _cis_integral(c, length):
    """``int_0^length e^{i c u} du`` with a series branch for small ``c``."""
    c = np.asarray(c, dtype=float)
    out = np.empty(np.broadcast(c, np.asarray(length)).shape, dtype=complex)
    scale = np.abs(c) * length
    small = scale < 1e-8
    cs = np.where(small, 1.0, c)  # dummy divisor where the series is used
    exact = (np.exp(1j * cs * length) - 1.0) / (1j * cs)
    series = length * (1.0 + 0.5j * c * length - (c * length) ** 2 / 6.0)
    out[...] = np.where(small, series, exact)
    if out.ndim == 0:
        return complex(out)
    return out


def _sinc_ratio(lam):
    """``pi*lam / sin(pi*lam)`` continued by 1 at ``lam = 0``."""
    lam = np.asarray(lam, dtype=float)
    small = np.abs(lam) < 1e-7
    safe = np.where(small, 1.0, lam)
    with np.errstate(invalid="ignore"):
        exact = np.pi * safe / np.sin(np.pi * safe)
    series = 1.0 + (np.pi * lam) ** 2 / 6.0
    out = np.where(small, series, exact)
    return float(out) if out.ndim == 0 else out


# cosine expansion of the squared rising edge:
# ((1 - cos a u)/2)^2 = 3/8 - (1/2) cos(a u) + (1/8) cos(2 a u)
_EDGE_COEFFS = (3.0 / 8.0, -0.5, 1.0 / 8.0)


def _squared_taper_integral(p: float, omega) -> np.ndarray:
    """``int_0^1 h_p(u)^2 e^{-i omega u} du`` in closed form."""
    omega = np.asarray(omega, dtype=float)
    if p == 0.0:
        return _cis_integral(-omega, 1.0)
    half = p / 2.0
    a = 2.0 * np.pi / p
    edge = _EDGE_COEFFS[0] * _cis_integral(-omega, half)
    for k in (1, 2):
        ck = _EDGE_COEFFS[k]
        edge = edge + 0.5 * ck * (
            _cis_integral(k * a - omega, half) + _cis_integral(-k * a - omega, half)
        )
    middle = np.exp(-1j * omega * half) * _cis_integral(-omega, 1.0 - p)
    return edge + middle + np.exp(-1j * omega) * np.conj(edge)


def h2_integral_approx(p: float, f, n: int, delta: float = 1.0, method: str = "closed_form"):
    """Continuous-integral approximation of the squared-taper DFT.

    Approximates ``h2_dft`` for a split cosine taper of fraction ``p`` and
    length ``n`` by ``int_0^1 h^2(u) e^{-i 2 pi n u f delta} du`` times the
    midpoint-sampling phase ``e^{-i pi f delta}`` and the correction factor
    ``pi f delta / sin(pi f delta)`` (defined as 1 at ``f = 0``).  The
    remainder relative to the exact DFT is ``O(1/n)`` uniformly over
    ``f delta`` in ``[0, 0.5]``.

    Parameters
    ----------
    p : float
        Split cosine taper fraction in ``[0, 1]``.
    f : float or array
        Frequencies with ``0 <= f * delta <= 0.5``.
    n : int
        Taper length entering the oscillation rate of the integrand.
    delta : float
        Sampling interval.
    method : str
        ``"closed_form"`` uses piecewise trigonometric antiderivatives;
        ``"quadrature"`` integrates adaptively with absolute tolerance 1e-12.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"taper fraction p must be in [0, 1], got {p}")
    if method not in ("closed_form", "quadrature"):
        raise InvalidParameterError(f"unknown method {method!r}")
    lam = np.asarray(f, dtype=float) * delta
    if np.any(lam < -1e-15) or np.any(lam > 0.5 + 1e-15):
        raise DomainError("f * delta must lie in [0, 0.5]")
    omega = 2.0 * np.pi * n * lam
    if method == "closed_form":
        integral = _squared_taper_integral(p, omega)
    else:
        integral = _quadrature_integral(p, omega)
    out = integral * np.exp(-1j * np.pi * lam) * _sinc_ratio(lam)
    return complex(out) if np.ndim(out) == 0 else out


def _quadrature_integral(p: float, omega) -> np.ndarray:
    def h2_of_u(u):
        return split_cosine_curve(p, np.asarray([u]))[0] ** 2

    # integrate each smooth piece separately; the shape has derivative
    # kinks at p/2 and 1 - p/2
    breaks = sorted({0.0, p / 2.0, 1.0 - p / 2.0, 1.0})
    pieces = [(a, b) for a, b in zip(breaks, breaks[1:]) if b > a]

    def one(w):
        total = 0.0 + 0.0j
        for a, b in pieces:
            re = quad(h2_of_u, a, b, weight="cos", wvar=w, epsabs=1e-13, limit=400)[0]
            im = quad(h2_of_u, a, b, weight="sin", wvar=w, epsabs=1e-13, limit=400)[0]
            total += re - 1j * im
        return total

    omega = np.asarray(omega, dtype=float)
    if omega.ndim == 0:
        return np.asarray(one(float(omega)))
    return np.asarray([one(float(w)) for w in omega])
