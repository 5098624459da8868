"""Command-line front end.

Subcommands
-----------
points         reordered lattice or Korobov p-set points as CSV
matvec         one fast (or naive) product ``Y a``
normalgen      normally distributed points with a given covariance
pde-uniform    mean FEM solution, affine coefficient
pde-lognormal  mean FEM solution, log-normal coefficient
bench          timing records of fast vs standard routes
selftest       built-in verification suites

All floating-point output uses 17 significant digits so values round-trip
exactly. CSV goes to ``--out`` or standard output.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import bench as benchmod
from .fastmv import FastLatticeMatrix, KorobovFastMatrix, naive_matvec
from .fem1d import Mesh1D, solve_lognormal, solve_uniform
from .gauss import GaussianSpec, cholesky_upper, generate_normal, random_upper_factor
from .lattice import (
    Transform,
    cbc_construct,
    korobov_pset,
    load_generating_vector,
    parse_generating_vector,
    reorder_lattice,
)
from .selftest import MUTATIONS, run_selftest

FLOAT_FMT = "%.17g"
TRANSFORM_NAMES = {"identity": Transform.IDENTITY, "shift": Transform.SHIFT_HALF,
                   "tent": Transform.TENT, "invnorm": Transform.INV_NORMAL_CDF}


class CliError(Exception):
    pass


# -- argument helpers --------------------------------------------------------

def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes"):
        return True
    if t in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def parse_weights(spec: str | None, s: int) -> np.ndarray:
    """Product weights from ``"j^-a"``, ``"const:c"`` or a comma list of ``s`` floats."""
    if spec is None:
        spec = "j^-2"
    text = spec.replace(" ", "")
    j = np.arange(1, s + 1, dtype=float)
    try:
        if text.startswith("j^"):
            return j ** float(text[2:])
        if text.startswith("const:"):
            return np.full(s, float(text[6:]))
        w = np.array([float(v) for v in text.split(",") if v], dtype=float)
    except ValueError:
        raise CliError(f"cannot parse weights {spec!r}") from None
    if w.shape != (s,):
        raise CliError(f"weights list has {w.size} entries, dimension is {s}")
    return w


def _read_text(value: str) -> str:
    return open(value).read() if os.path.isfile(value) else value


def _numbers(value: str | None):
    if value is None:
        return None
    text = _read_text(value).replace(",", " ")
    try:
        return np.array([float(v) for v in text.split()], dtype=float)
    except ValueError:
        raise CliError(f"cannot parse numbers from {value!r}") from None


def _generating_vector(args):
    """Generating vector from ``--gvec`` (file or inline) or by CBC."""
    if args.gvec is not None:
        if os.path.isfile(args.gvec):
            gv = load_generating_vector(args.gvec, N=args.n)
        else:
            if args.n is None:
                raise CliError("--gvec given inline needs --n")
            gv = parse_generating_vector(args.gvec, N=args.n)
        if args.s is not None and args.s != gv.s:
            raise CliError(f"--s {args.s} does not match the {gv.s} generating vector components")
        return gv
    if args.n is None or args.s is None:
        raise CliError("need --n and --s (or --gvec) to construct a lattice")
    return cbc_construct(args.n, args.s, parse_weights(args.weights, args.s),
                         allow_repeats=args.s >= args.n)


def _transform(args, default="identity") -> Transform:
    return TRANSFORM_NAMES[args.transform or default]


def _zero_policy(args, transform: Transform) -> dict:
    drop = args.drop_zero_point
    if drop is None:
        drop = transform is Transform.INV_NORMAL_CDF
    if not drop and not np.isfinite(transform.at_zero) and args.zero_value is None:
        raise CliError("--drop-zero-point false with invnorm needs --zero-value")
    return dict(drop_zero=drop, zero_value=args.zero_value)


def _open_out(args):
    if args.out in (None, "-"):
        return sys.stdout, False
    return open(args.out, "w", newline=""), True


def _write_matrix(args, X, header: str | None = None):
    fh, close = _open_out(args)
    try:
        X = np.atleast_2d(np.asarray(X))
        if header:
            fh.write(header + "\n")
        if X.size:
            np.savetxt(fh, X, fmt=FLOAT_FMT if X.dtype.kind == "f" else "%d", delimiter=",")
    finally:
        if close:
            fh.close()


# -- subcommands -------------------------------------------------------------

def cmd_points(args) -> int:
    transform = _transform(args)
    if args.k is not None:
        if args.s is None:
            raise CliError("Korobov p-set needs --s")
        P = korobov_pset(args.k, args.s)
        if args.numerators:
            X = KorobovFastMatrix(P).matmat(np.eye(args.s))
            X = np.rint(X * args.k).astype(np.int64)
        else:
            X = KorobovFastMatrix(P, transform).matmat(np.eye(args.s))
        _write_matrix(args, X)
        return 0
    L = reorder_lattice(_generating_vector(args))
    if args.numerators:
        _write_matrix(args, L.numerator_matrix())
        return 0
    policy = _zero_policy(args, transform)
    X = L.points()
    body = transform(X[1:])
    if policy["drop_zero"]:
        out = body
    else:
        row0 = transform.at_zero if policy["zero_value"] is None else policy["zero_value"]
        out = np.vstack([np.full((1, L.s), row0), body])
    _write_matrix(args, out)
    return 0


def cmd_matvec(args) -> int:
    L = reorder_lattice(_generating_vector(args))
    transform = _transform(args)
    policy = _zero_policy(args, transform)
    a = _numbers(args.vector)
    if a is None:
        a = np.random.default_rng(args.seed).uniform(-1.0, 1.0, size=L.s)
    if a.shape != (L.s,):
        raise CliError(f"vector has {a.size} entries, dimension is {L.s}")
    if args.method == "fast":
        y = FastLatticeMatrix(L, transform, **policy).matvec(a)
    else:
        y = naive_matvec(L, transform, a, **policy)
    _write_matrix(args, y[:, None])
    return 0


def _read_covariance(path: str) -> np.ndarray:
    try:
        S = np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read covariance CSV {path!r}: {exc}") from None
    return S


def cmd_normalgen(args) -> int:
    if args.covariance is not None:
        A = cholesky_upper(_read_covariance(args.covariance))
        if args.s is not None and args.s != A.shape[0]:
            raise CliError(f"--s {args.s} does not match the {A.shape[0]}x{A.shape[0]} covariance")
        args.s = A.shape[0]
    else:
        if args.s is None:
            raise CliError("normalgen needs --covariance or --s")
        A = random_upper_factor(args.s, np.random.default_rng(args.seed))
    mu = _numbers(args.mu)
    if mu is None:
        mu = np.zeros(A.shape[0])
    spec = GaussianSpec(mu, A)
    L = reorder_lattice(_generating_vector(args))
    policy = _zero_policy(args, Transform.INV_NORMAL_CDF)
    _write_matrix(args, generate_normal(L, spec, **policy))
    return 0


def _pde(args, solve, **extra) -> int:
    if args.m is None:
        raise CliError("need --m (number of intervals)")
    mesh = Mesh1D(args.m)
    L = reorder_lattice(_generating_vector(args))
    mean, timings = solve(L, args.m, args.method, block_rows=args.block_rows, **extra)
    _write_matrix(args, np.column_stack([mesh.interior, mean]), header="x,u")
    if args.timings:
        with open(args.timings, "w") as fh:
            fh.write("phase,seconds\n")
            for phase, sec in timings.items():
                fh.write(f"{phase},{sec:.17g}\n")
            fh.write(f"total,{sum(timings.values()):.17g}\n")
    return 0


def cmd_pde_uniform(args) -> int:
    return _pde(args, solve_uniform)


def cmd_pde_lognormal(args) -> int:
    return _pde(args, solve_lognormal, **_zero_policy(args, Transform.INV_NORMAL_CDF))


def cmd_bench(args) -> int:
    if args.n_list is None:
        raise CliError("bench needs --n (comma-separated primes)")
    try:
        Ns = [int(v) for v in args.n_list.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"cannot parse --n {args.n_list!r}") from None
    grid = benchmod.build_grid(args.experiment, Ns, args.s_expr, args.m_expr)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    try:
        records = benchmod.run_bench(args.experiment, grid, methods=methods, reps=args.reps,
                                     seed=args.seed, budget_seconds=args.budget_seconds,
                                     parallel=args.parallel)
    except benchmod.ChecksumMismatch as exc:
        print(f"fatal: checksum mismatch: {exc}", file=sys.stderr)
        return 3
    fh, close = _open_out(args)
    try:
        benchmod.write_records(records, fh)
    finally:
        if close:
            fh.close()
    return 0


def cmd_selftest(args) -> int:
    report = run_selftest(args.mutate)
    fh, close = _open_out(args)
    try:
        fh.write(report.text() + "\n")
    finally:
        if close:
            fh.close()
    return 0 if report.ok else 1


# -- parser ------------------------------------------------------------------

def _lattice_args(p, s_required=False):
    p.add_argument("--n", type=int, help="prime number of lattice points N")
    p.add_argument("--s", type=int, help="dimension s")
    p.add_argument("--gvec", help="generating vector: file ('N s' + components) or inline list")
    p.add_argument("--weights", help="CBC product weights: 'j^-2' (default), 'const:c' or a list")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output CSV path (default stdout)")


def _zero_args(p):
    p.add_argument("--drop-zero-point", type=_bool, default=None, metavar="{true|false}",
                   help="omit the point at the origin (default: true for invnorm)")
    p.add_argument("--zero-value", type=float,
                   help="coordinate used for the origin when it is kept under invnorm")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fastqmc", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("points", help="write lattice or Korobov p-set points")
    _lattice_args(p)
    p.add_argument("--k", type=int, help="prime K: write the Korobov p-set instead")
    p.add_argument("--transform", choices=sorted(TRANSFORM_NAMES), default="identity")
    p.add_argument("--numerators", action="store_true",
                   help="write the integers N x (untransformed) instead of x")
    _zero_args(p)
    p.set_defaults(func=cmd_points)

    p = sub.add_parser("matvec", help="product of the point matrix with a vector")
    _lattice_args(p)
    p.add_argument("--transform", choices=sorted(TRANSFORM_NAMES), default="identity")
    p.add_argument("--vector", help="vector a (file or inline); default random from --seed")
    p.add_argument("--method", choices=("fast", "naive"), default="fast")
    _zero_args(p)
    p.set_defaults(func=cmd_matvec)

    p = sub.add_parser("normalgen", help="normally distributed QMC points")
    _lattice_args(p)
    p.add_argument("--covariance", help="CSV file with s rows of s numbers")
    p.add_argument("--mu", help="mean vector (file or inline); default zero")
    _zero_args(p)
    p.set_defaults(func=cmd_normalgen)

    for name, func, zero in (("pde-uniform", cmd_pde_uniform, False),
                             ("pde-lognormal", cmd_pde_lognormal, True)):
        p = sub.add_parser(name, help="mean FEM solution over all lattice points")
        _lattice_args(p)
        p.add_argument("--m", type=int, help="number of mesh intervals M")
        p.add_argument("--method", choices=("fast", "std"), default="fast")
        p.add_argument("--block-rows", type=int, help="stream the std route in blocks of rows")
        p.add_argument("--timings", help="write per-phase timings to this CSV")
        if zero:
            _zero_args(p)
        p.set_defaults(func=func)

    p = sub.add_parser("bench", help="benchmark fast vs standard routes")
    p.add_argument("--experiment", choices=benchmod.EXPERIMENTS, default="uniform")
    p.add_argument("--n", dest="n_list", help="comma-separated primes, e.g. 67,127,257")
    p.add_argument("--s", dest="s_expr", default="2N", help="dimension: integer, kN, N/k, sqrtN")
    p.add_argument("--m", dest="m_expr", default="2N", help="intervals: integer, kN, N/k, sqrtN")
    p.add_argument("--methods", default="std,fast")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--budget-seconds", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--parallel", action="store_true",
                   help="allow multithreading (times not comparable to default runs)")
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", help="run the built-in verification suites")
    p.add_argument("--mutate", choices=sorted(MUTATIONS),
                   help="inject a deliberate defect; the run must then fail")
    p.add_argument("--out")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 1
    except (CliError, ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
