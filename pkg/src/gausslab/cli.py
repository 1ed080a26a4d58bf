"""Command-line driver.

Subcommands: table, moments, fit, verify, shortinterval, constants.
Output is RFC-4180 CSV (header row, '.' decimal, 17 significant digits);
the runtime_ms column sits last so everything before it is byte-identical
across reruns and thread counts.

Exit codes: 0 success, 1 verification/criterion failure, 2 usage error,
3 I/O or cache error.  GAUSSLAB_CACHE_DIR sets the default cache directory.
"""

from __future__ import annotations

import argparse
import csv
import fcntl
import io
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import moments, rk, theory, verify
from .fit import c3_standard_error, recover_c3
from .discrepancy import prefix_counts
from .moments import MomentSample, Statistic

__all__ = ["main", "ExperimentConfig"]

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_IO = 3

_STAT_NAMES = {s.value: s for s in Statistic}


@dataclass
class ExperimentConfig:
    """One moments run: dimension, ascending X grid, statistics, caching."""

    k: int
    x_grid: list[float]
    statistics: list[Statistic]
    cache_dir: str | None = None
    n_max_override: int | None = None
    threads: int | None = None
    c3: float | None = None

    def __post_init__(self):
        if not self.x_grid:
            raise ValueError("empty X grid")
        if sorted(self.x_grid) != list(self.x_grid):
            raise ValueError("x_grid must be sorted ascending")
        if not self.statistics:
            raise ValueError("no statistics requested")


def _needed_n_max(config: ExperimentConfig) -> int:
    need = 0
    for stat in config.statistics:
        for x in config.x_grid:
            if stat in (
                Statistic.SMOOTH_SECOND,
                Statistic.LAPLACE_SECOND,
                Statistic.SMOOTH_WEIGHTED_FIRST,
            ):
                need = max(need, moments.exp_cutoff(config.k, x))
            else:
                need = max(need, int(round(x)))
    return need


def _default_cache_dir(arg: str | None) -> str | None:
    return arg if arg is not None else os.environ.get("GAUSSLAB_CACHE_DIR")


def _cache_path(cache_dir: str, k: int, n_max: int) -> str:
    return os.path.join(cache_dir, f"rk{k}_{n_max}.rktb")


class _CacheLock:
    """Advisory per-directory lock so one process owns a cache directory."""

    def __init__(self, cache_dir: str):
        self._path = os.path.join(cache_dir, ".gausslab.lock")
        self._fh = None

    def __enter__(self):
        self._fh = open(self._path, "a+")
        try:
            fcntl.flock(self._fh.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError as exc:
            self._fh.close()
            raise RuntimeError(f"cache directory is locked by another process: {exc}") from exc
        return self

    def __exit__(self, *exc_info):
        fcntl.flock(self._fh.fileno(), fcntl.LOCK_UN)
        self._fh.close()
        return False


def _obtain_table(k: int, n_max: int, cache_dir: str | None, log=print) -> rk.RkTable:
    if cache_dir is None:
        return rk.build_rk_table(k, n_max)
    os.makedirs(cache_dir, exist_ok=True)
    path = _cache_path(cache_dir, k, n_max)
    with _CacheLock(cache_dir):
        if os.path.exists(path):
            try:
                return rk.load_table(path)
            except (rk.CacheFormatError, rk.CacheTruncatedError, rk.CacheChecksumError) as exc:
                log(f"warning: discarding bad cache {path}: {exc}", file=sys.stderr)
        table = rk.build_rk_table(k, n_max)
        rk.save_table(table, path)
        return table


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: str | None, header: list[str], rows: list[list[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    data = buf.getvalue()
    if path is None:
        sys.stdout.write(data)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(data)


def _predicted_for(stat: Statistic, k: int, x: float, c3: float | None) -> float | None:
    try:
        if stat is Statistic.SMOOTH_SECOND:
            return theory.predicted_smooth(k, x, c3 if k == 3 else None)
        if stat is Statistic.SHARP_SECOND:
            return theory.predicted_sharp(k, x, c3 if k == 3 else None)
        if stat is Statistic.LAPLACE_SECOND:
            return theory.predicted_laplace(k, x, c3 if k == 3 else None)
        if stat is Statistic.SHARP_INTEGRAL_SECOND:
            if k == 3 and c3 is not None:
                return theory.predicted_integral_p3(x, c3)
            return None
        if stat is Statistic.SMOOTH_WEIGHTED_FIRST:
            return theory.predicted_smooth_weighted_first(k, x)
        if stat is Statistic.SHARP_WEIGHTED_FIRST:
            return math.pi / 2.0 * x**2 if k == 3 else None
    except ValueError:
        return None
    return None


_STAT_FUNCS = {
    Statistic.SMOOTH_SECOND: moments.smooth_second_moment,
    Statistic.SHARP_SECOND: moments.sharp_second_moment,
    Statistic.LAPLACE_SECOND: moments.laplace_second_moment,
    Statistic.SHARP_INTEGRAL_SECOND: moments.sharp_integral_second_moment,
    Statistic.SMOOTH_WEIGHTED_FIRST: moments.smooth_weighted_first_moment,
    Statistic.SHARP_WEIGHTED_FIRST: moments.sharp_weighted_first_moment_p3,
}

MOMENTS_HEADER = ["k", "X", "statistic", "value", "truncation_bound", "predicted_value", "runtime_ms"]


def run_moments(config: ExperimentConfig, log=print) -> tuple[list[list[str]], int]:
    """All (statistic, X) cells as CSV rows; returns (rows, exit_code)."""
    n_max = config.n_max_override
    if n_max is None:
        n_max = _needed_n_max(config)
    table = _obtain_table(config.k, n_max, config.cache_dir, log=log)
    series = prefix_counts(table)
    # fill the shared lazy caches before any worker threads start
    series.p_values()
    series.prefix_float()

    exp_stats = (
        Statistic.SMOOTH_SECOND,
        Statistic.LAPLACE_SECOND,
        Statistic.SMOOTH_WEIGHTED_FIRST,
    )
    # sharp statistics are defined at integer X; snap the grid point
    cells = [
        (stat, float(x) if stat in exp_stats else int(round(x)))
        for stat in config.statistics
        for x in config.x_grid
    ]

    def compute(cell) -> tuple[MomentSample | Exception, float]:
        stat, x = cell
        start = time.perf_counter()
        try:
            sample = _STAT_FUNCS[stat](series, x)
        except Exception as exc:
            return exc, (time.perf_counter() - start) * 1e3
        return sample, (time.perf_counter() - start) * 1e3

    workers = config.threads or os.cpu_count() or 1
    if workers > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(compute, cells))
    else:
        outcomes = [compute(c) for c in cells]

    rows = []
    status = EXIT_OK
    for (stat, x), (outcome, ms) in zip(cells, outcomes):
        if isinstance(outcome, Exception):
            rows.append([str(config.k), _fmt(x), stat.value, f"ERROR: {outcome}", "", "", f"{ms:.3f}"])
            status = EXIT_USAGE
            continue
        predicted = _predicted_for(stat, config.k, float(x), config.c3)
        rows.append(
            [
                str(config.k),
                _fmt(x),
                stat.value,
                _fmt(outcome.value),
                _fmt(outcome.truncation_bound),
                "" if predicted is None else _fmt(predicted),
                f"{ms:.3f}",
            ]
        )
    return rows, status


def _geometric_grid(x_min: float, x_max: float, points: int) -> list[float]:
    if points < 1 or x_min <= 0 or x_max < x_min:
        raise ValueError("bad grid: need 0 < x-min <= x-max and points >= 1")
    if points == 1:
        return [x_min]
    ratio = (x_max / x_min) ** (1.0 / (points - 1))
    return [x_min * ratio**j for j in range(points)]


def cmd_table(args) -> int:
    cache_dir = _default_cache_dir(args.cache_dir) or "."
    os.makedirs(cache_dir, exist_ok=True)
    path = _cache_path(cache_dir, args.k, args.n_max)
    with _CacheLock(cache_dir):
        if os.path.exists(path):
            try:
                rk.load_table(path)
                print(f"cache {path} is valid; skipping rebuild")
                return EXIT_OK
            except (rk.CacheFormatError, rk.CacheTruncatedError, rk.CacheChecksumError) as exc:
                print(f"warning: rebuilding bad cache {path}: {exc}", file=sys.stderr)
        start = time.perf_counter()
        table = rk.build_rk_table(args.k, args.n_max)
        elapsed = time.perf_counter() - start
        rk.save_table(table, path)
    rate = (args.n_max + 1) / max(elapsed, 1e-9)
    size = os.path.getsize(path)
    print(
        f"built r_{args.k}(0..{args.n_max}) in {elapsed:.2f} s "
        f"({rate:,.0f} values/s) -> {path} ({size} bytes)"
    )
    return EXIT_OK


def cmd_moments(args) -> int:
    stats = [_STAT_NAMES[s] for s in args.stat]
    config = ExperimentConfig(
        k=args.k,
        x_grid=_geometric_grid(args.x_min, args.x_max, args.points),
        statistics=stats,
        cache_dir=_default_cache_dir(args.cache_dir),
        n_max_override=args.n_max,
        threads=args.threads,
        c3=args.c3,
    )
    rows, status = run_moments(config)
    _write_csv(args.out, MOMENTS_HEADER, rows)
    return status


def _read_moment_csv(path: str) -> list[MomentSample]:
    samples = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:6] != MOMENTS_HEADER[:6]:
            raise ValueError(f"{path}:1: not a moments CSV (header {header})")
        for lineno, row in enumerate(reader, start=2):
            if len(row) < 6:
                raise ValueError(f"{path}:{lineno}: expected >= 6 columns, got {len(row)}")
            try:
                k = int(row[0])
                x = float(row[1])
                stat = _STAT_NAMES[row[2]]
                value = float(row[3])
                bound = float(row[4]) if row[4] else 0.0
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            samples.append(MomentSample(k, x, stat, value, bound))
    return samples


def cmd_fit(args) -> int:
    try:
        samples = _read_moment_csv(args.csv_in)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    wanted = Statistic.SMOOTH_SECOND if args.mode == "smooth" else Statistic.SHARP_SECOND
    subset = [s for s in samples if s.statistic is wanted and s.k == 3]
    if not subset:
        print(f"error: no k=3 {wanted.value} rows in {args.csv_in}", file=sys.stderr)
        return EXIT_USAGE
    c3, diag = recover_c3(subset)
    se = c3_standard_error(subset)
    c3p = theory.constants_for(3).c3_prime
    print(f"mode: {args.mode}")
    print(f"samples_used: {diag.samples_used}")
    print(f"c3_prime_fixed: {_fmt(c3p)}")
    print(f"c3_estimate: {_fmt(c3)}")
    print(f"c3_stderr: {_fmt(se)}")
    print(f"residual_rms: {_fmt(diag.residual_rms)}")
    print(f"condition_estimate: {_fmt(diag.condition_estimate)}")
    print(f"deviation_from_10.6: {_fmt(abs(c3 - 10.6))}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_battery(
        args.level, report=lambda r: print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail}")
    )
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed ({args.level})")
    if failed:
        print("failed: " + ", ".join(r.name for r in failed))
        return EXIT_VERIFY
    return EXIT_OK


def cmd_shortinterval(args) -> int:
    beta = args.beta
    if not (0.0 < beta <= 1.0):
        print("error: beta must be in (0, 1]", file=sys.stderr)
        return EXIT_USAGE
    grid = [int(x) for x in _geometric_grid(args.x_min, args.x_max, args.points)]
    n_max = max(int(x + x**beta) for x in grid)
    table = _obtain_table(3, n_max, _default_cache_dir(args.cache_dir))
    series = prefix_counts(table)
    p = series.p_values()
    psq = p * p
    rows = []
    for x in grid:
        width = float(x) ** beta
        lo = max(1, math.ceil(x - width))
        hi = min(n_max, math.floor(x + width))
        window = float(np.sum(psq[lo : hi + 1]))
        ratio = window / (float(x) ** (1.0 + beta) * math.log(x))
        rows.append(
            [
                "3",
                _fmt(x),
                _fmt(beta),
                str(lo),
                str(hi),
                _fmt(window),
                _fmt(ratio),
            ]
        )
    _write_csv(args.out, ["k", "X", "beta", "n_lo", "n_hi", "window_sum", "ratio"], rows)
    return EXIT_OK


def cmd_constants(args) -> int:
    consts = theory.constants_for(args.k)
    rows = [[str(args.k), name, _fmt(value)] for name, value in consts.rows()]
    _write_csv(args.out, ["k", "constant", "value"], rows)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gausslab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", help="build a representation table and cache it")
    p.add_argument("--k", type=int, required=True, choices=range(1, rk.MAX_K + 1))
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--cache-dir")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("moments", help="compute moment statistics on a geometric X grid")
    p.add_argument("--k", type=int, required=True, choices=range(1, rk.MAX_K + 1))
    p.add_argument("--x-min", type=float, required=True)
    p.add_argument("--x-max", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--stat", action="append", required=True, choices=sorted(_STAT_NAMES))
    p.add_argument("--n-max", type=int, default=None, help="override the derived table size")
    p.add_argument("--cache-dir")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--c3", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("fit", help="recover the dimension-3 constant from a moments CSV")
    p.add_argument("csv_in")
    p.add_argument("--mode", choices=("smooth", "sharp"), default="smooth")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("verify", help="run the identity battery")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("shortinterval", help="short-interval diagnostic scan (k = 3)")
    p.add_argument("--x-min", type=float, required=True)
    p.add_argument("--x-max", type=float, required=True)
    p.add_argument("--points", type=int, default=3)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--cache-dir")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_shortinterval)

    p = sub.add_parser("constants", help="print the explicit constants for one dimension")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_constants)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
