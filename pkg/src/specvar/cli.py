"""Command-line harness: spectra, variance tables, Monte-Carlo checks, benchmarks.

Subcommands
-----------
``spectrum``     spectral densities (linear and dB) on a fine frequency grid
``figure2``      exact vs. approximate relative variances over a parameter grid
``mc-validate``  empirical relative variances from simulated replicates
``bench``        wall-clock comparison of the direct and FFT covariance paths
``selftest``     quick numerical identities (white-noise oracle, Parseval, rate)

All commands are deterministic given the configuration and seed.  Output is
CSV with a header row, UTF-8, LF line endings, and shortest round-trip float
formatting.  Exit codes: 0 success, 1 invalid configuration, 2 numerical
failure.  Options may also be given in a plain ``key=value`` configuration
file (``--config``); command-line flags override file entries.  The
environment variable ``SPECVAR_THREADS`` sets the worker count used by the
direct covariance path.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import variance
from .errors import NumericalError
from .estimator import (
    MeanMode,
    SmoothingScheme,
    _grid_periodogram_batch,
    grid_frequency,
    window_indices,
)
from .process import (
    ProcessModel,
    ar4_process,
    ar_process,
    simulate_batch,
    spectral_density,
    white_noise,
)
from .taper import (
    h2_dft,
    h2_dft_grid,
    h2_integral_approx,
    make_split_cosine_taper,
)

__all__ = [
    "ExperimentConfig",
    "main",
    "spectrum_rows",
    "figure2_rows",
    "mc_validate_rows",
    "bench_rows",
    "run_selftest",
    "empirical_variance_and_se",
    "db",
]


class CliConfigError(ValueError):
    """Invalid command line or configuration file."""


@dataclass
class ExperimentConfig:
    """Shared experiment settings; defaults reproduce the standard grid."""

    processes: list[str] = field(default_factory=lambda: ["white", "ar4"])
    n: int = 1024
    nprime_factors: list[int] = field(default_factory=lambda: [1, 2])
    p_values: list[float] = field(default_factory=lambda: [0.2, 0.5])
    m_values: list[int] = field(default_factory=lambda: [0, 1, 2])
    delta: float = 1.0
    seed: int = 42
    output: str = ""
    mean_mode: str = "weighted"
    replicates: int = 5000
    sizes: list[int] = field(default_factory=lambda: [128, 256, 512, 1024])
    threads: int | None = None
    points: int = 2049

    def __post_init__(self):
        if self.n < 2:
            raise CliConfigError(f"series length must be >= 2, got {self.n}")
        for name in ("processes", "nprime_factors", "p_values", "m_values", "sizes"):
            if not getattr(self, name):
                raise CliConfigError(f"{name} must be non-empty")
        if self.delta <= 0:
            raise CliConfigError("sampling interval must be positive")
        if any(f < 1 for f in self.nprime_factors):
            raise CliConfigError("grid factors must be >= 1")
        if self.mean_mode not in ("known", "arithmetic", "weighted"):
            raise CliConfigError(f"unknown mean mode {self.mean_mode!r}")

    def models(self) -> list[ProcessModel]:
        out = []
        for label in self.processes:
            if label in ("white", "white_noise", "white-noise"):
                out.append(white_noise(sigma2=1.0, delta=self.delta))
            elif label == "ar4":
                out.append(ar4_process(delta=self.delta))
            elif label.startswith("ar:"):
                phi = [float(c) for c in label[3:].split(",") if c]
                if not phi:
                    raise CliConfigError(f"no AR coefficients in {label!r}")
                out.append(ar_process(phi, sigma2=1.0, delta=self.delta))
            else:
                raise CliConfigError(
                    f"unknown process {label!r} (use white, ar4, or ar:c1,c2,...)"
                )
        return out

    def mode(self) -> MeanMode:
        if self.mean_mode == "known":
            return MeanMode.known(0.0)
        if self.mean_mode == "arithmetic":
            return MeanMode.arithmetic()
        return MeanMode.weighted()


def db(power) -> np.ndarray:
    """Power quantity in decibel, ``10 log10(x)``."""
    return 10.0 * np.log10(power)


def empirical_variance_and_se(values: np.ndarray) -> tuple[float, float]:
    """Sample variance and its Monte-Carlo standard error.

    The standard error uses the moment estimator
    ``sqrt((m4 - s^4) / n)`` with ``m4`` the fourth central sample moment,
    which stays valid for the skewed chi-square-like statistics handled here.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 2:
        raise CliConfigError("need at least 2 replicates")
    s2 = float(np.var(values, ddof=1))
    centered = values - values.mean()
    m4 = float(np.mean(centered**4))
    return s2, float(np.sqrt(max(m4 - s2**2, 0.0) / n))


# ----------------------------------------------------------------------
# row builders (pure, used by the commands and by tests)
# ----------------------------------------------------------------------


def spectrum_rows(config: ExperimentConfig, points: int | None = None) -> list[tuple]:
    """Rows ``(process, f, spectral_density, db)`` on a fine frequency grid."""
    points = config.points if points is None else points
    if points < 2048:
        raise CliConfigError("spectrum grid needs at least 2048 frequencies")
    rows = []
    for model in config.models():
        f = np.linspace(0.0, model.nyquist, points)
        s = spectral_density(model, f)
        d = db(s)
        rows.extend(
            (model.name, float(fi), float(si), float(di)) for fi, si, di in zip(f, s, d)
        )
    return rows


def figure2_rows(config: ExperimentConfig) -> list[tuple]:
    """Exact vs. approximate relative variances over the experiment grid.

    One row ``(process, p, m, nprime, k, f, exact, usual, new)`` per interior
    grid index ``k = 1 .. nprime/2 - 1`` of every
    ``(process, nprime, p, m)`` cell.  The covariance grid is computed once
    per ``(process, nprime, p)`` with the FFT path and shared across ``m``.
    """
    rows = []
    m_max = max(config.m_values)
    for model in config.models():
        for factor in config.nprime_factors:
            nprime = int(factor * config.n)
            for p in config.p_values:
                taper = make_split_cosine_taper(p, config.n)
                cov = variance.accelerated_exact_cov_grid(model, taper, nprime, m_max)
                for m in config.m_values:
                    scheme = SmoothingScheme.uniform(nprime, m)
                    table = variance.variance_table(model, taper, scheme, cov=cov)
                    rows.extend(
                        (
                            model.name,
                            float(p),
                            int(m),
                            int(nprime),
                            int(k),
                            float(f),
                            float(exact),
                            float(usual),
                            float(new),
                        )
                        for k, f, exact, usual, new in zip(
                            table.k, table.f, table.exact, table.usual, table.new
                        )
                    )
    return rows


def default_mc_indices(nprime: int) -> list[int]:
    half = nprime // 2
    return [half // 4, half // 2, 3 * half // 4]


def mc_validate_rows(
    config: ExperimentConfig, replicates: int | None = None, ks: list[int] | None = None
) -> list[tuple]:
    """Empirical vs. exact relative variances from simulated replicates.

    For every cell the same simulated replicates are reused; the statistic
    per replicate is the smoothing-window average of periodogram values each
    normalized by its own spectral density, so its variance is exactly what
    :func:`specvar.variance.exact_rel_variance` computes.  Rows are
    ``(process, p, m, nprime, n, k, f, replicates, empirical, exact, mc_se)``.
    """
    replicates = config.replicates if replicates is None else int(replicates)
    if replicates < 100:
        raise CliConfigError(f"need at least 100 replicates, got {replicates}")
    mode = config.mode()
    rows = []
    for index, model in enumerate(config.models()):
        samples = simulate_batch(model, config.n, replicates, seed=[config.seed, index])
        for factor in config.nprime_factors:
            nprime = int(factor * config.n)
            half = nprime // 2
            freqs = np.asarray(grid_frequency(nprime, config.delta, np.arange(half + 1)))
            s_grid = spectral_density(model, freqs)
            selected = default_mc_indices(nprime) if ks is None else [int(k) for k in ks]
            for p in config.p_values:
                taper = make_split_cosine_taper(p, config.n)
                grid_vals = _grid_periodogram_batch(
                    samples, config.delta, taper, mode, nprime
                )
                normalized = grid_vals / s_grid
                for m in config.m_values:
                    scheme = SmoothingScheme.uniform(nprime, m)
                    for k in selected:
                        idx, weights = window_indices(scheme, k)
                        stats = normalized[:, idx] @ weights
                        empirical, se = empirical_variance_and_se(stats)
                        exact = variance.exact_rel_variance(model, taper, scheme, k)
                        rows.append(
                            (
                                model.name,
                                float(p),
                                int(m),
                                int(nprime),
                                int(config.n),
                                int(k),
                                float(freqs[k]),
                                int(replicates),
                                float(empirical),
                                float(exact),
                                float(se),
                            )
                        )
    return rows


def bench_rows(config: ExperimentConfig) -> list[tuple]:
    """Wall-clock timings of the direct vs. FFT covariance grids.

    Uses the AR(4) benchmark process, the largest requested taper fraction
    and smoothing half-width, and ``nprime = 2n``.  Rows are
    ``(n, nprime, m, p, direct_seconds, accel_seconds, speedup, threads)``.
    """
    p = max(config.p_values)
    m = max(config.m_values)
    threads = variance.default_threads() if config.threads is None else config.threads
    rows = []
    for n in config.sizes:
        model = ar4_process(delta=config.delta)
        taper = make_split_cosine_taper(p, n)
        nprime = 2 * n
        start = time.perf_counter()
        direct = variance.direct_cov_grid(model, taper, nprime, m, threads=threads)
        t_direct = time.perf_counter() - start
        start = time.perf_counter()
        accel = variance.accelerated_exact_cov_grid(model, taper, nprime, m)
        t_accel = time.perf_counter() - start
        mask = ~np.isnan(direct.band)
        worst = float(
            np.max(
                np.abs(direct.band[mask] - accel.band[mask])
                / np.maximum(np.abs(direct.band[mask]), 1e-300)
            )
        )
        if worst > 1e-6:
            raise NumericalError(
                f"accelerated grid disagrees with direct at n={n}: rel err {worst:.3g}"
            )
        rows.append(
            (
                int(n),
                int(nprime),
                int(m),
                float(p),
                float(t_direct),
                float(t_accel),
                float(t_direct / t_accel),
                int(threads),
            )
        )
    return rows


def growth_ratios(rows: list[tuple]) -> list[tuple[int, int, float]]:
    """Consecutive direct-path time ratios ``(n_small, n_big, ratio)``."""
    out = []
    for prev, cur in zip(rows, rows[1:]):
        out.append((prev[0], cur[0], cur[4] / prev[4]))
    return out


# ----------------------------------------------------------------------
# selftest
# ----------------------------------------------------------------------


def run_selftest(stream=sys.stdout) -> int:
    """Run the core numerical identities, print one line each, return 0/2."""
    checks = []

    def check(name: str, ok: bool, detail: str):
        checks.append(ok)
        stream.write(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})\n")

    # white-noise oracle identity
    n = 64
    model = white_noise()
    worst = 0.0
    for p in (0.0, 0.5):
        taper = make_split_cosine_taper(p, n)
        freqs = np.asarray(grid_frequency(n, 1.0, np.arange(1, n // 2)))
        for i, f in enumerate(freqs):
            for g in freqs[i:]:
                exact = variance.exact_gaussian_rel_covariance(model, taper, f, g)
                approx = variance.approx_rel_covariance(taper, f, g, 1.0)
                worst = max(worst, abs(exact - approx) / max(approx, 1e-12))
    check("white-noise covariance identity (n=64)", worst <= 1e-9, f"max rel err {worst:.3g}")

    # Parseval identity for the squared-taper transform
    n = 256
    worst = 0.0
    for p in (0.2, 0.5):
        taper = make_split_cosine_taper(p, n)
        for nprime in (n, 2 * n):
            total = float(np.sum(np.abs(h2_dft_grid(taper, nprime)) ** 2))
            expected = (nprime / n) * taper.sum_h4 / n
            worst = max(worst, abs(total - expected) / expected)
    check("squared-taper Parseval identity (n=256)", worst <= 1e-10, f"max rel err {worst:.3g}")

    # integral approximation error decays at least as fast as 1/n
    # (in practice the midpoint sampling makes it second order)
    lam = np.arange(0.0, 0.5 + 1e-12, 1e-3)
    errs = {}
    for n in (512, 1024):
        taper = make_split_cosine_taper(0.5, n)
        exact = h2_dft(taper, lam, 1.0)
        approx = h2_integral_approx(0.5, lam, n, 1.0)
        errs[n] = float(np.max(np.abs(exact - approx)))
    ratio = errs[1024] / errs[512]
    check(
        "integral approximation error decays at the 1/n rate or faster",
        ratio <= 0.7,
        f"err(1024)/err(512) = {ratio:.3f}",
    )

    return 0 if all(checks) else 2


# ----------------------------------------------------------------------
# command plumbing
# ----------------------------------------------------------------------

_SCHEMAS = {
    "spectrum": ("process", "f", "spectral_density", "db"),
    "figure2": ("process", "p", "m", "nprime", "k", "f", "exact", "usual", "new"),
    "mc-validate": (
        "process",
        "p",
        "m",
        "nprime",
        "n",
        "k",
        "f",
        "replicates",
        "empirical",
        "exact",
        "mc_se",
    ),
    "bench": ("n", "nprime", "m", "p", "direct_seconds", "accel_seconds", "speedup", "threads"),
}


def write_csv(path: str, header: tuple, rows: list[tuple]):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])


def _format_cell(cell):
    if isinstance(cell, float):
        return repr(cell)
    return cell


def _parse_int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _parse_float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _parse_str_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliConfigError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="specvar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: _Parser):
        p.add_argument("--config", help="plain key=value configuration file")
        p.add_argument("--process", type=_parse_str_list, dest="processes",
                       help="comma list: white, ar4, or ar:c1,c2,...")
        p.add_argument("--n", type=int, help="series / taper length")
        p.add_argument("--nprime-factors", type=_parse_int_list,
                       help="grid sizes as multiples of n, e.g. 1,2")
        p.add_argument("--p-values", type=_parse_float_list,
                       help="split cosine taper fractions, e.g. 0.2,0.5")
        p.add_argument("--m-values", type=_parse_int_list,
                       help="smoothing half-widths, e.g. 0,1,2")
        p.add_argument("--delta", type=float, help="sampling interval")
        p.add_argument("--seed", type=int, help="random seed (u64)")
        p.add_argument("--output", help="output CSV path")

    p_spectrum = sub.add_parser("spectrum", help="spectral densities in linear and dB scale")
    add_common(p_spectrum)
    p_spectrum.add_argument("--points", type=int,
                            help="number of grid frequencies (>= 2048, default 2049)")

    p_fig = sub.add_parser("figure2", help="exact vs. approximate relative variances")
    add_common(p_fig)

    p_mc = sub.add_parser("mc-validate", help="Monte-Carlo check of the exact variances")
    add_common(p_mc)
    p_mc.add_argument("--replicates", type=int, help="number of simulated series (>= 100)")
    p_mc.add_argument("--k-indices", type=_parse_int_list,
                      help="grid indices to validate (default: quarter points)")
    p_mc.add_argument("--mean-mode", choices=("known", "arithmetic", "weighted"),
                      help="mean handling for the periodogram (default weighted)")

    p_bench = sub.add_parser("bench", help="time the direct vs. FFT covariance paths")
    add_common(p_bench)
    p_bench.add_argument("--sizes", type=_parse_int_list,
                         help="series lengths to benchmark, e.g. 128,256,512,1024")
    p_bench.add_argument("--threads", type=int, help="worker threads for the direct path")

    sub.add_parser("selftest", help="run the built-in numerical identities")
    return parser


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise CliConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, value = line.partition("=")
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise CliConfigError(f"cannot read config file {path}: {exc}") from exc
    return values


_FILE_PARSERS = {
    "processes": _parse_str_list,
    "process": _parse_str_list,
    "n": int,
    "nprime_factors": _parse_int_list,
    "p_values": _parse_float_list,
    "m_values": _parse_int_list,
    "delta": float,
    "seed": int,
    "output": str,
    "points": int,
    "replicates": int,
    "k_indices": _parse_int_list,
    "mean_mode": str,
    "sizes": _parse_int_list,
    "threads": int,
}


def _merge_config(args: argparse.Namespace) -> ExperimentConfig:
    file_values: dict = {}
    if getattr(args, "config", None):
        for key, raw in _read_config_file(args.config).items():
            if key not in _FILE_PARSERS:
                raise CliConfigError(f"unknown configuration key {key!r}")
            parsed = _FILE_PARSERS[key](raw)
            file_values["processes" if key == "process" else key] = parsed

    def pick(name, default):
        value = getattr(args, name, None)
        if value is not None:
            return value
        return file_values.get(name, default)

    defaults = ExperimentConfig()
    config = ExperimentConfig(
        processes=pick("processes", defaults.processes),
        n=pick("n", defaults.n),
        nprime_factors=pick("nprime_factors", defaults.nprime_factors),
        p_values=pick("p_values", defaults.p_values),
        m_values=pick("m_values", defaults.m_values),
        delta=pick("delta", defaults.delta),
        seed=pick("seed", defaults.seed),
        output=pick("output", defaults.output),
        mean_mode=pick("mean_mode", defaults.mean_mode),
        replicates=pick("replicates", defaults.replicates),
        sizes=pick("sizes", defaults.sizes),
        threads=pick("threads", defaults.threads),
        points=pick("points", defaults.points),
    )
    return config


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "selftest":
            return run_selftest()
        config = _merge_config(args)
        if args.command == "spectrum":
            rows = spectrum_rows(config)
            path = config.output or "spectrum.csv"
        elif args.command == "figure2":
            rows = figure2_rows(config)
            path = config.output or "figure2.csv"
        elif args.command == "mc-validate":
            rows = mc_validate_rows(config, ks=getattr(args, "k_indices", None))
            path = config.output or "mc_validate.csv"
        elif args.command == "bench":
            rows = bench_rows(config)
            path = config.output or "bench.csv"
            for n_small, n_big, ratio in growth_ratios(rows):
                verdict = "super-quadratic" if ratio > 4.0 else "below cubic trend"
                print(f"direct path t({n_big})/t({n_small}) = {ratio:.2f} ({verdict})")
            print(f"threads used: {rows[0][-1]}")
        else:  # pragma: no cover - argparse enforces the choices
            raise CliConfigError(f"unknown command {args.command!r}")
        try:
            write_csv(path, _SCHEMAS[args.command], rows)
        except OSError as exc:
            print(f"error: cannot write {path}: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {path} ({len(rows)} rows)")
        return 0
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except CliConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
