"""Tapered spectral estimation with exact and approximate variance computation.

The package covers the full chain from data tapers through smoothed
periodogram estimates to their relative variances: classical and
smoothing-span-aware approximations next to an exact Gaussian oracle, plus a
command-line harness (``specvar``) that emits the comparisons as CSV.
"""

from .errors import (
    DegenerateSpectrumError,
    DomainError,
    EdgeFrequencyError,
    InvalidParameterError,
    ModelError,
    NumericalError,
    ShapeMismatchError,
)
from .estimator import (
    MeanMode,
    SmoothingScheme,
    grid_frequency,
    grid_periodogram,
    smoothed_estimate,
    tapered_periodogram,
    window_indices,
)
from .process import (
    AR4_COEFFS,
    ProcessModel,
    TimeSeries,
    ar4_process,
    ar_process,
    autocovariances,
    simulate,
    simulate_batch,
    spectral_density,
    spectral_peaks,
    white_noise,
)
from .taper import (
    Taper,
    h2_dft,
    h2_dft_grid,
    h2_integral_approx,
    inflation_factor,
    inflation_factor_limit,
    make_rectangular_taper,
    make_split_cosine_taper,
    split_cosine_curve,
)
from .variance import (
    RelCovarianceGrid,
    VarianceTable,
    accelerated_exact_cov_grid,
    approx_rel_covariance,
    direct_cov_grid,
    exact_gaussian_rel_covariance,
    exact_rel_variance,
    exact_rel_variance_grid,
    new_rel_variance,
    usual_rel_variance,
    variance_table,
)

__version__ = "0.1.0"

__all__ = [
    "AR4_COEFFS",
    "DegenerateSpectrumError",
    "DomainError",
    "EdgeFrequencyError",
    "InvalidParameterError",
    "MeanMode",
    "ModelError",
    "NumericalError",
    "ProcessModel",
    "RelCovarianceGrid",
    "ShapeMismatchError",
    "SmoothingScheme",
    "Taper",
    "TimeSeries",
    "VarianceTable",
    "accelerated_exact_cov_grid",
    "approx_rel_covariance",
    "ar4_process",
    "ar_process",
    "autocovariances",
    "direct_cov_grid",
    "exact_gaussian_rel_covariance",
    "exact_rel_variance",
    "exact_rel_variance_grid",
    "grid_frequency",
    "grid_periodogram",
    "h2_dft",
    "h2_dft_grid",
    "h2_integral_approx",
    "inflation_factor",
    "inflation_factor_limit",
    "make_rectangular_taper",
    "make_split_cosine_taper",
    "new_rel_variance",
    "simulate",
    "simulate_batch",
    "smoothed_estimate",
    "spectral_density",
    "spectral_peaks",
    "split_cosine_curve",
    "tapered_periodogram",
    "usual_rel_variance",
    "variance_table",
    "white_noise",
    "window_indices",
]
