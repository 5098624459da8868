"""Benchmark harness: fast vs standard routes on grids of configurations.

Three experiments mirror the applications of the library:

``normal``
    ``N - 1`` points of ``N(0, A^T A)`` in dimension ``s``; ``A`` is a seeded
    random upper-triangular factor.
``uniform``
    Mean FEM solution with the affine coefficient, ``M`` intervals.
``lognormal``
    Mean FEM solution with the log-normal coefficient.

Both methods of one configuration run interleaved, repetition by
repetition, so slow drifts of the machine affect them alike. Each record
keeps the mean and the median over the repetitions. Outputs are reduced to
a checksum; the two methods must agree or :class:`ChecksumMismatch` is
raised. A method whose projected time exceeds the budget is not run and is
recorded as ``skipped`` with its projection.

Timings are wall-clock and machine-specific; only ratios and trends carry
over between machines.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import re
import statistics
import sys
import time
from contextlib import nullcontext
from dataclasses import asdict, dataclass, fields

import numpy as np
from threadpoolctl import threadpool_limits

from .fem1d import lognormal_table, solve_lognormal, solve_uniform, uniform_table
from .gauss import GaussianSpec, generate_normal, generate_normal_naive, random_upper_factor
from .lattice import cbc_construct, reorder_lattice
from .modular import is_prime

__all__ = [
    "EXPERIMENTS",
    "METHODS",
    "BenchRecord",
    "ChecksumMismatch",
    "output_checksum",
    "parse_size",
    "build_grid",
    "run_bench",
    "write_records",
    "read_records",
]

EXPERIMENTS = ("normal", "uniform", "lognormal")
METHODS = ("std", "fast")


class ChecksumMismatch(RuntimeError):
    """Fast and standard outputs of one configuration disagree."""


@dataclass
class BenchRecord:
    experiment: str
    N: int
    s: int
    M: int | None
    method: str
    status: str                 # "ok" or "skipped"
    reps: int
    mean_seconds: float
    median_seconds: float
    projected_seconds: float | None
    checksum: str

    @property
    def config(self) -> tuple:
        return (self.experiment, self.N, self.s, self.M)


def output_checksum(values, digits: int = 8) -> str:
    """Hash of ``values`` that tolerates rounding-level differences.

    The sum, the sum of squares and an index-weighted sum are each rounded to
    ``digits`` significant digits relative to their natural scale (``sum|x|``
    for the signed sums), together with the shape. Rounding single entries
    would make a mismatch likely somewhere in a large array; a few aggregates
    cross a rounding boundary only with negligible probability.
    """
    x = np.asarray(values, dtype=float)
    flat = x.reshape(-1)
    w = np.arange(1, flat.size + 1, dtype=float) / max(flat.size, 1)
    abs_scale = float(np.abs(flat).sum())
    stats = [
        (float(flat.sum()), abs_scale),
        (float(flat @ flat), float(flat @ flat)),
        (float(w @ flat), abs_scale),
    ]
    parts = [str(x.shape)]
    for value, scale in stats:
        if not math.isfinite(value):
            parts.append(repr(value))
            continue
        if scale == 0.0:
            parts.append("0")
            continue
        quantum = 10.0 ** (math.floor(math.log10(scale)) - digits + 1)
        parts.append(str(round(value / quantum)))
    return hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]


_SIZE = re.compile(r"^\s*(?:(\d+)\s*\*?\s*)?N\s*(?:/\s*(\d+))?\s*$")


def parse_size(expr, N: int) -> int:
    """Evaluate a grid size: an integer, ``kN``, ``N/k`` or ``sqrtN``.

    >>> parse_size("2N", 67), parse_size("N/2", 67), parse_size("sqrtN", 67), parse_size(5, 67)
    (134, 33, 8, 5)
    """
    if isinstance(expr, (int, np.integer)):
        return int(expr)
    text = str(expr).strip()
    if text.isdigit():
        return int(text)
    if text.replace(" ", "") in ("sqrtN", "sqrt(N)"):
        return max(1, math.isqrt(N))
    m = _SIZE.match(text)
    if not m:
        raise ValueError(f"cannot parse size {expr!r}; use an integer, kN, N/k or sqrtN")
    k = int(m.group(1)) if m.group(1) else 1
    d = int(m.group(2)) if m.group(2) else 1
    return max(1, k * N // d)


def build_grid(experiment: str, Ns, s_expr, m_expr=None) -> list[tuple[int, int, int | None]]:
    """Configurations ``(N, s, M)``; ``M`` is None for the normal experiment."""
    if experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}; choose from {EXPERIMENTS}")
    grid = []
    for N in Ns:
        N = int(N)
        if not is_prime(N):
            raise ValueError(f"grid entry N={N} is not prime")
        s = parse_size(s_expr, N)
        if experiment == "normal":
            grid.append((N, s, None))
        else:
            if m_expr is None:
                raise ValueError(f"experiment {experiment!r} needs M")
            M = parse_size(m_expr, N)
            if M < 2:
                raise ValueError("M must be at least 2")
            grid.append((N, s, M))
    return grid


def _cost(experiment: str, method: str, N: int, s: int, M: int | None) -> float:
    # operation-count shape used only to project run times between configs
    if experiment == "normal":
        t, extra = s, 0.0
    elif experiment == "uniform":
        t, extra = 2 * M - 3, 8.0 * N * M
    else:
        t, extra = M, 8.0 * N * M
    if method == "std":
        return N * s * t + N * s + extra
    return t * N * max(math.log2(N), 1.0) * 4.0 + N * s + t * s + extra


class _Case:
    """One configuration: shared inputs and one callable per method."""

    def __init__(self, experiment, N, s, M, seed, workers):
        self.experiment = experiment
        gv = cbc_construct(N, s, allow_repeats=s >= N)
        L = reorder_lattice(gv)
        if experiment == "normal":
            rng = np.random.default_rng([seed, N, s])
            spec = GaussianSpec(np.zeros(s), random_upper_factor(s, rng))
            self.run = {
                "fast": lambda: self._timed(lambda: generate_normal(L, spec, workers=workers)),
                "std": lambda: self._timed(lambda: generate_normal_naive(L, spec)),
            }
        elif experiment == "uniform":
            table = uniform_table(M, s)
            self.run = {k: (lambda k=k: self._pde(solve_uniform(L, M, k, workers=workers,
                                                                table=table)))
                        for k in METHODS}
        else:
            table = lognormal_table(M, s)
            self.run = {k: (lambda k=k: self._pde(solve_lognormal(L, M, k, workers=workers,
                                                                  table=table)))
                        for k in METHODS}

    @staticmethod
    def _timed(f):
        t0 = time.perf_counter()
        out = f()
        return out, time.perf_counter() - t0

    @staticmethod
    def _pde(result):
        # coefficient tables are shared inputs; count point-dependent phases
        mean, t = result
        return mean, t["assembly"] + t["solve"] + t["mean"]


def run_bench(experiment: str, grid, *, methods=METHODS, reps: int = 5, seed: int = 0,
              budget_seconds: float | None = None, parallel: bool = False,
              log=None) -> list[BenchRecord]:
    """Run every configuration of ``grid`` with the requested methods.

    Parameters
    ----------
    experiment : {"normal", "uniform", "lognormal"}
    grid : sequence of (N, s, M)
        As produced by :func:`build_grid`.
    methods : sequence of {"std", "fast"}
    reps : int
        Repetitions per method; interleaved between methods.
    budget_seconds : float, optional
        A method is skipped when its projected time over all repetitions
        exceeds this. Projections scale the last measured median of the same
        method by an operation-count model.
    parallel : bool
        Allow multithreaded BLAS and FFTs. Results are identical; times are
        not comparable with single-threaded runs.
    log : file-like, optional
        Receives progress and budget messages (default stderr).

    Raises
    ------
    ChecksumMismatch
        When both methods ran and their output checksums differ.
    """
    log = sys.stderr if log is None else log
    methods = tuple(methods)
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise ValueError(f"methods must be drawn from {METHODS}, got {methods}")
    if reps < 1:
        raise ValueError("reps must be at least 1")
    workers = -1 if parallel else None
    limiter = nullcontext() if parallel else threadpool_limits(1)
    last: dict[str, tuple[float, tuple]] = {}
    records: list[BenchRecord] = []
    with limiter:
        for N, s, M in grid:
            active, projected = [], {}
            for meth in methods:
                proj = None
                if meth in last:
                    t_prev, cfg_prev = last[meth]
                    proj = t_prev * _cost(experiment, meth, N, s, M) / _cost(experiment, meth, *cfg_prev)
                projected[meth] = proj
                if budget_seconds is not None and proj is not None and proj * reps > budget_seconds:
                    print(f"budget: {experiment} N={N} s={s} M={M} {meth} projected "
                          f"{proj * reps:.3g}s > {budget_seconds:g}s, skipped", file=log)
                else:
                    active.append(meth)
            times = {meth: [] for meth in active}
            outputs = {}
            if active:
                case = _Case(experiment, N, s, M, seed, workers)
                for _ in range(reps):
                    for meth in active:
                        out, dt = case.run[meth]()
                        times[meth].append(dt)
                        outputs[meth] = out
            sums = {meth: output_checksum(outputs[meth]) for meth in active}
            if len(set(sums.values())) > 1:
                dev = float(np.max(np.abs(outputs["fast"] - outputs["std"])))
                raise ChecksumMismatch(
                    f"{experiment} N={N} s={s} M={M}: checksums {sums} differ "
                    f"(max abs deviation {dev:.3e})")
            for meth in methods:
                if meth in active:
                    med = statistics.median(times[meth])
                    last[meth] = (med, (N, s, M))
                    rec = BenchRecord(experiment, N, s, M, meth, "ok", reps,
                                      statistics.fmean(times[meth]), med,
                                      projected[meth], sums[meth])
                else:
                    proj = projected[meth]
                    rec = BenchRecord(experiment, N, s, M, meth, "skipped", 0,
                                      math.nan, math.nan, proj, "")
                records.append(rec)
                detail = (f"median {rec.median_seconds:.4g}s" if rec.status == "ok"
                          else f"projected {rec.projected_seconds:.4g}s per rep")
                print(f"{experiment} N={N} s={s} M={M} {meth}: {rec.status}, {detail}", file=log)
    return records


CSV_FIELDS = [f.name for f in fields(BenchRecord)]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.17g}"
    return str(v)


def write_records(records, fh=None) -> str:
    """Write records as CSV (to ``fh`` if given) and return the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        d = asdict(r)
        w.writerow([_fmt(d[k]) for k in CSV_FIELDS])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def read_records(text: str) -> list[BenchRecord]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(BenchRecord(
            experiment=row["experiment"],
            N=int(row["N"]),
            s=int(row["s"]),
            M=int(row["M"]) if row["M"] else None,
            method=row["method"],
            status=row["status"],
            reps=int(row["reps"]),
            mean_seconds=float(row["mean_seconds"]),
            median_seconds=float(row["median_seconds"]),
            projected_seconds=float(row["projected_seconds"]) if row["projected_seconds"] else None,
            checksum=row["checksum"],
        ))
    return out
