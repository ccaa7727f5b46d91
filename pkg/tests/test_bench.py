"""Timing checks for the direct vs. FFT-accelerated covariance paths.

Marked slow: the direct reference path at n=1024 runs for tens of seconds.
Deselect with ``pytest -m "not slow"`` when iterating.
"""

import time

import pytest

from specvar import accelerated_exact_cov_grid, ar4_process, direct_cov_grid, make_split_cosine_taper
from specvar.cli import ExperimentConfig, bench_rows, growth_ratios


def _time_direct(n: int) -> float:
    model = ar4_process()
    taper = make_split_cosine_taper(0.5, n)
    start = time.perf_counter()
    direct_cov_grid(model, taper, 2 * n, 2, threads=1)
    return time.perf_counter() - start


@pytest.mark.slow
def test_direct_path_scales_cubically():
    """Doubling n multiplies the direct-path time by ~8 (4 to 12 allowed)."""
    _time_direct(64)  # warm-up
    t256 = _time_direct(256)
    t512 = _time_direct(512)
    ratio = t512 / t256
    print(f"direct path t(512)/t(256) = {ratio:.2f}")
    assert 4.0 <= ratio <= 12.0, f"t(512)/t(256) = {ratio:.2f}"


@pytest.mark.slow
def test_accelerated_speedup_at_n1024():
    """The FFT path is at least 5x faster than the direct one at n=1024."""
    model = ar4_process()
    taper = make_split_cosine_taper(0.5, 1024)
    accelerated_exact_cov_grid(model, taper, 512, 2)  # warm-up
    start = time.perf_counter()
    direct_cov_grid(model, taper, 2048, 2, threads=1)
    t_direct = time.perf_counter() - start
    start = time.perf_counter()
    accelerated_exact_cov_grid(model, taper, 2048, 2)
    t_accel = time.perf_counter() - start
    speedup = t_direct / t_accel
    print(f"n=1024 speedup: {speedup:.1f}x (direct {t_direct:.2f}s, fft {t_accel:.3f}s)")
    assert speedup >= 5.0


@pytest.mark.slow
def test_bench_command_growth_verdict():
    rows = bench_rows(ExperimentConfig(sizes=[128, 256, 512], p_values=[0.5], m_values=[2]))
    ratios = growth_ratios(rows)
    assert all(r > 2.0 for _, _, r in ratios), ratios
