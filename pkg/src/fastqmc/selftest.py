"""Built-in verification suites, runnable without pytest.

Each suite compares one operation against an independent oracle and reports
the maximum deviation. :func:`run_selftest` returns a report whose ``ok``
flag is the conjunction of all checks; the CLI maps it to the exit status.

A mutation hook deliberately breaks the circulant index (``z_k`` read as
``z_{k+1}``) to demonstrate that the suites catch such a defect; under it the
factorization-identity check of ``fastmv`` must fail.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field
from fractions import Fraction
from unittest import mock

import numpy as np

from . import fastmv, fem1d, gauss, lattice, modular, spectral
from .lattice import GeneratingVector, Transform, reorder_lattice

__all__ = ["Check", "SelftestReport", "MUTATIONS", "run_selftest"]


@dataclass
class Check:
    suite: str
    module: str
    operation: str
    deviation: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return bool(self.deviation <= self.tolerance)

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        return (f"{tag} [{self.suite}] {self.module}.{self.operation}: "
                f"max deviation {self.deviation:.3e} (tolerance {self.tolerance:.1e})")


@dataclass
class SelftestReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def suites(self) -> list[str]:
        return list(dict.fromkeys(c.suite for c in self.checks))

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def text(self) -> str:
        lines = [c.line() for c in self.checks]
        n_fail = len(self.failures())
        lines.append(f"{len(self.suites)} suites, {len(self.checks)} checks, "
                     f"{n_fail} failed: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def _maxdev(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape:
        return float("inf")
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def _primes(lo, hi):
    return [p for p in range(lo, hi + 1) if modular.is_prime(p)]


def _worked_example(rep: SelftestReport):
    suite = "worked example"
    gv = GeneratingVector(7, (1, 5, 3))
    L = reorder_lattice(gv)
    rep.checks.append(Check(suite, "modular", "primitive_root",
                            float(abs(L.root.beta - 3) + abs(L.root.beta_inv - 5)), 0.0))
    rep.checks.append(Check(suite, "lattice", "reorder_lattice",
                            float(np.abs(np.subtract(L.c, (1, 6, 2))).max()), 0.0))
    expected = [(0, 0, 0), (1, 5, 3), (5, 4, 1), (4, 6, 5), (6, 2, 4), (2, 3, 6), (3, 1, 2)]
    got = [lattice.as_fractions(lattice.reordered_numerators(L, n), 7) for n in range(7)]
    want = [tuple(Fraction(v, 7) for v in row) for row in expected]
    dev = max(float(abs(a - b)) for ga, wa in zip(got, want) for a, b in zip(ga, wa))
    rep.checks.append(Check(suite, "lattice", "reordered_point", dev, 0.0))
    F = fastmv.FastLatticeMatrix(L, Transform.IDENTITY)
    rep.checks.append(Check(suite, "fastmv", "factorization identity Y' = Z P",
                            _maxdev(F.dense()[1:] * 7, np.array(expected[1:])), 1e-12))


def _circulant(rep: SelftestReport):
    suite = "circulant"
    rng = np.random.default_rng(1)
    dev_dft = dev_apply = 0.0
    for m in (1, 2, 6, 7, 31, 127, 254):
        x = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        k = np.arange(m)
        naive = np.exp(-2j * np.pi * np.outer(k, k) / m) @ x
        dev_dft = max(dev_dft, float(np.abs(spectral.dft(x) - naive).max())
                      / max(1.0, np.abs(naive).max()))
        base, v = rng.standard_normal(m), rng.standard_normal((m, 3))
        for strategy in ("direct", "embedded"):
            Z = spectral.CirculantOperator(base, strategy=strategy)
            dev_apply = max(dev_apply, _maxdev(Z.apply(v), Z.dense() @ v),
                            _maxdev(Z.apply_rows(v.T), (Z.dense() @ v).T))
    rep.checks.append(Check(suite, "spectral", "dft", dev_dft, 1e-12))
    rep.checks.append(Check(suite, "spectral", "circulant_apply", dev_apply, 1e-10))


def _factorization(rep: SelftestReport):
    # dense(Z) dense(P) against the independently enumerated point matrix
    suite = "factorization identity"
    rng = np.random.default_rng(2)
    dev = 0.0
    for N in _primes(3, 101):
        s = int(rng.integers(1, 9))
        gv = GeneratingVector(N, tuple(int(v) for v in rng.integers(1, N, size=s)))
        L = reorder_lattice(gv)
        for t in (Transform.IDENTITY, Transform.TENT):
            F = fastmv.FastLatticeMatrix(L, t)
            Zp = F.circulant.dense() @ F.selection.dense()
            dev = max(dev, _maxdev(Zp, fastmv.naive_points(L, t)[1:]))
    rep.checks.append(Check(suite, "fastmv", "factorization identity Y' = Z P", dev, 1e-12))


def _oracle(rep: SelftestReport):
    suite = "fast vs naive"
    rng = np.random.default_rng(3)
    primes = _primes(11, 2003)
    dev_v = dev_m = 0.0
    transforms = list(Transform)
    for i in range(24):
        N = int(rng.choice(primes))
        s = int(rng.integers(1, 120))
        gv = GeneratingVector(N, tuple(int(v) for v in rng.integers(1, N, size=s)))
        L = reorder_lattice(gv)
        t = transforms[i % len(transforms)]
        kw = dict(drop_zero=t is Transform.INV_NORMAL_CDF)
        F = fastmv.FastLatticeMatrix(L, t, **kw)
        a = rng.uniform(-1, 1, size=s)
        A = rng.uniform(-1, 1, size=(s, int(rng.integers(1, 10))))
        dev_v = max(dev_v, _maxdev(F.matvec(a), fastmv.naive_matvec(L, t, a, **kw)))
        dev_m = max(dev_m, _maxdev(F.matmat(A), fastmv.naive_matmat(L, t, A, **kw)))
    rep.checks.append(Check(suite, "fastmv", "fast_matvec", dev_v, 1e-9))
    rep.checks.append(Check(suite, "fastmv", "fast_matmat", dev_m, 1e-9))


def _korobov(rep: SelftestReport):
    suite = "korobov p-set"
    rng = np.random.default_rng(4)
    dev_set = dev_mm = 0.0
    for K in _primes(3, 19):
        for s in (1, 3, 5):
            P = lattice.korobov_pset(K, s)
            fast_pts = fastmv.KorobovFastMatrix(P).matmat(np.eye(s))
            brute = [tuple(pow(g, j, K) * n % K for j in range(s))
                     for g in range(1, K) for n in range(1, K)]
            mine = sorted(map(tuple, np.rint(fast_pts * K).astype(int).tolist()))
            dev_set = max(dev_set, 0.0 if mine == sorted(brute) else 1.0)
            A = rng.standard_normal((s, 3))
            dev_mm = max(dev_mm, _maxdev(fastmv.korobov_fast_matmat(P, Transform.TENT, A),
                                         fastmv.korobov_naive_matmat(P, Transform.TENT, A)))
    rep.checks.append(Check(suite, "lattice", "korobov multiset", dev_set, 0.0))
    rep.checks.append(Check(suite, "fastmv", "korobov_fast_matmat", dev_mm, 1e-10))


def _gauss(rep: SelftestReport):
    suite = "gaussian"
    rng = np.random.default_rng(5)
    B = rng.standard_normal((5, 5))
    Sigma = B.T @ B + 5 * np.eye(5)
    A = gauss.cholesky_upper(Sigma)
    rep.checks.append(Check(suite, "gauss", "cholesky_upper",
                            _maxdev(A.T @ A, Sigma) / np.abs(Sigma).max(), 1e-10))
    rep.checks.append(Check(suite, "gauss", "inv_normal_cdf",
                            abs(float(gauss.inv_normal_cdf(0.975)) - 1.959963984540054), 1e-12))
    L = reorder_lattice(GeneratingVector(13, (1, 5, 3, 7, 11)))
    spec = gauss.GaussianSpec(rng.standard_normal(5), A)
    rep.checks.append(Check(suite, "gauss", "generate_normal",
                            _maxdev(gauss.generate_normal(L, spec),
                                    gauss.generate_normal_naive(L, spec)), 1e-9))


def _fem(rep: SelftestReport):
    suite = "fem assembly"
    rng = np.random.default_rng(6)
    dev_u = dev_l = dev_mean = 0.0
    for N, s, M in ((13, 13, 8), (31, 20, 16), (7, 3, 2)):
        gv = GeneratingVector(N, tuple(int(v) for v in rng.integers(1, N, size=s)))
        L = reorder_lattice(gv)
        fa, na = fem1d.assemble_uniform_fast(L, M), fem1d.assemble_uniform_naive(L, M)
        dev_u = max(dev_u, _maxdev(fa.diag, na.diag), _maxdev(fa.off, na.off))
        fl, nl = fem1d.assemble_lognormal_fast(L, M), fem1d.assemble_lognormal_naive(L, M)
        # the coefficient is positive, so every entry is nonzero
        dev_l = max(dev_l, _maxdev(fl.diag / nl.diag, 1.0 + 0 * nl.diag),
                    _maxdev(fl.off / nl.off, 1.0 + 0 * nl.off))
        mean_fast, _ = fem1d.solve_uniform(L, M, "fast")
        dense = [np.linalg.solve(T.to_dense(), np.ones(M - 1)) for T in na]
        dev_mean = max(dev_mean, _maxdev(mean_fast, np.mean(dense, axis=0)))
    rep.checks.append(Check(suite, "fem1d", "assemble_uniform_fast", dev_u, 1e-9))
    rep.checks.append(Check(suite, "fem1d", "assemble_lognormal_fast (relative)", dev_l, 1e-9))
    rep.checks.append(Check(suite, "fem1d", "mean_solution", dev_mean, 1e-10))
    M = 8
    k = np.arange(1, M)
    u = fem1d.thomas_solve(fem1d.assemble_A0(M), np.ones(M - 1))
    rep.checks.append(Check(suite, "fem1d", "thomas_solve (s=0 closed form)",
                            _maxdev(u, k * (M - k) / (4 * M)), 1e-12))


SUITES = (_worked_example, _circulant, _factorization, _oracle, _korobov, _gauss, _fem)


@contextlib.contextmanager
def _circulant_off_by_one():
    real = fastmv.beta_powers

    def shifted(N, beta):
        return np.roll(real(N, beta), -1)     # base z_k read as z_{k+1}

    with mock.patch.object(fastmv, "beta_powers", shifted):
        yield


MUTATIONS = {"circulant-off-by-one": _circulant_off_by_one}


def run_selftest(mutation: str | None = None) -> SelftestReport:
    """Run all suites; ``mutation`` names an entry of :data:`MUTATIONS`."""
    if mutation is not None and mutation not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutation!r}; choose from {sorted(MUTATIONS)}")
    ctx = MUTATIONS[mutation]() if mutation else contextlib.nullcontext()
    rep = SelftestReport()
    with ctx:
        for suite in SUITES:
            try:
                suite(rep)
            except Exception as exc:      # a crashing suite is a failed suite
                name = suite.__name__.strip("_").replace("_", " ")
                rep.checks.append(Check(name, suite.__module__.rsplit(".", 1)[-1],
                                        f"raised {type(exc).__name__}: {exc}",
                                        float("inf"), 0.0))
    return rep
