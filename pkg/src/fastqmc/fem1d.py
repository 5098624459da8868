"""Piecewise-linear FEM for the parametric two-point boundary value problem

    -(a(x, y) u'(x, y))' = g(x) on (0, 1),   u(0, y) = u(1, y) = 0,

with the diffusion coefficient either affine in the parameters,

    a(x, y) = 2 + sum_j y_j j^{-3/2} sin(2 pi j x),   y_j uniform on [-1/2, 1/2],

or its exponential with ``y_j`` standard normal. The mesh has ``M`` equal
intervals and ``M - 1`` interior hat functions, so every stiffness matrix is
symmetric tridiagonal of order ``M - 1``. The load vector is all ones.

Stiffness matrices for all QMC points are assembled with one fast lattice
product per nonzero matrix position (affine case) or per quadrature node
(log-normal case).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .fastmv import FastLatticeMatrix, naive_points
from .lattice import ReorderedLattice, Transform

__all__ = [
    "Mesh1D",
    "Tridiagonal",
    "TridiagonalBatch",
    "psi",
    "affine_coefficient",
    "assemble_A0",
    "assemble_Aj",
    "affine_tables",
    "midpoint_rule",
    "uniform_table",
    "lognormal_table",
    "assemble_uniform_fast",
    "assemble_uniform_std",
    "assemble_uniform_naive",
    "assemble_lognormal_fast",
    "assemble_lognormal_std",
    "assemble_lognormal_naive",
    "thomas_solve",
    "mean_solution",
    "solve_uniform",
    "solve_lognormal",
]

PSI0 = 2.0


@dataclass(frozen=True)
class Mesh1D:
    """Uniform mesh ``x_k = k / M`` with hat functions ``phi_1..phi_{M-1}``."""

    M: int

    def __post_init__(self):
        if self.M < 2:
            raise ValueError(f"need at least 2 intervals, got M={self.M}")

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.M + 1) / self.M

    @property
    def interior(self) -> np.ndarray:
        return self.nodes[1:-1]

    def hat(self, k: int, x):
        x = np.asarray(x, dtype=float)
        return np.maximum(0.0, 1.0 - np.abs(x * self.M - k))

    def hat_derivative(self, k: int, x):
        """Derivative of ``phi_k``, taking the left-element value at the kink."""
        x = np.asarray(x, dtype=float)
        t = x * self.M
        return np.where((t > k - 1) & (t <= k), float(self.M),
                        np.where((t > k) & (t < k + 1), -float(self.M), 0.0))


@dataclass
class Tridiagonal:
    """Symmetric tridiagonal matrix given by its diagonal and off-diagonal."""

    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        self.diag = np.asarray(self.diag, dtype=float)
        self.off = np.asarray(self.off, dtype=float)
        if self.off.shape != (max(self.diag.size - 1, 0),):
            raise ValueError("off-diagonal must be one shorter than the diagonal")

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)

    def matvec(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = self.diag * u
        out[:-1] += self.off * u[1:]
        out[1:] += self.off * u[:-1]
        return out


class TridiagonalBatch:
    """Stiffness matrices ``B(y_0), ..., B(y_{N-1})`` stored as two arrays.

    ``diag`` has shape ``(N, n)`` and ``off`` shape ``(N, n - 1)``.
    """

    def __init__(self, diag, off):
        self.diag = np.asarray(diag, dtype=float)
        self.off = np.asarray(off, dtype=float)
        if self.diag.ndim != 2 or self.off.shape != (self.diag.shape[0], self.diag.shape[1] - 1):
            raise ValueError("inconsistent batch shapes")

    @classmethod
    def from_positions(cls, diag_t, off_t) -> "TridiagonalBatch":
        """Build from position-major arrays of shape ``(n, N)`` and ``(n - 1, N)``."""
        return cls(np.asarray(diag_t).T, np.asarray(off_t).T)

    def __len__(self) -> int:
        return self.diag.shape[0]

    def __getitem__(self, n: int) -> Tridiagonal:
        return Tridiagonal(self.diag[n], self.off[n])

    def __iter__(self):
        return (self[n] for n in range(len(self)))

    def solve(self, rhs) -> np.ndarray:
        """Thomas algorithm on every matrix; ``rhs`` of shape ``(n,)`` or ``(N, n)``."""
        N, n = self.diag.shape
        rhs = np.broadcast_to(np.asarray(rhs, dtype=float), (N, n))
        # sweep over positions with all N systems in a contiguous row
        b = np.ascontiguousarray(self.diag.T)
        c = np.ascontiguousarray(self.off.T)
        d = np.ascontiguousarray(rhs.T)
        cp = np.empty((max(n - 1, 0), N))
        dp = np.empty((n, N))
        piv = b[0]
        _check_pivot(piv, 0)
        if n > 1:
            cp[0] = c[0] / piv
        dp[0] = d[0] / piv
        for i in range(1, n):
            piv = b[i] - c[i - 1] * cp[i - 1]
            _check_pivot(piv, i)
            if i < n - 1:
                cp[i] = c[i] / piv
            dp[i] = (d[i] - c[i - 1] * dp[i - 1]) / piv
        x = np.empty((n, N))
        x[n - 1] = dp[n - 1]
        for i in range(n - 2, -1, -1):
            x[i] = dp[i] - cp[i] * x[i + 1]
        return np.ascontiguousarray(x.T)


def _check_pivot(piv, row: int):
    bad = ~np.isfinite(piv) | (piv == 0.0)
    if np.any(bad):
        raise np.linalg.LinAlgError(f"zero pivot in row {row} of the tridiagonal solve")


def thomas_solve(T: Tridiagonal, rhs) -> np.ndarray:
    """Solve ``T u = rhs`` in O(n)."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (T.n,):
        raise ValueError(f"right-hand side has shape {rhs.shape}, expected ({T.n},)")
    return TridiagonalBatch(T.diag[None], T.off[None]).solve(rhs[None])[0]


def mean_solution(solutions) -> np.ndarray:
    solutions = np.asarray(solutions, dtype=float)
    if solutions.ndim != 2 or solutions.shape[0] == 0:
        raise ValueError("need a non-empty (N, M-1) array of solutions")
    return solutions.mean(axis=0)


# -- coefficient ------------------------------------------------------------

def psi(j: int, x):
    """Basis function ``j^{-3/2} sin(2 pi j x)``; ``psi(0, x) = 2``."""
    x = np.asarray(x, dtype=float)
    if j == 0:
        return np.full_like(x, PSI0)
    return j ** -1.5 * np.sin(2.0 * np.pi * j * x)


def affine_coefficient(x, y) -> np.ndarray:
    """``2 + sum_j y_j psi_j(x)`` for points ``x`` and one parameter vector ``y``."""
    x = np.asarray(x, dtype=float)
    out = np.full_like(x, PSI0)
    for j, yj in enumerate(np.asarray(y, dtype=float), start=1):
        out += yj * psi(j, x)
    return out


# -- affine stiffness matrices ---------------------------------------------

def assemble_A0(M: int) -> Tridiagonal:
    """Stiffness matrix of the constant coefficient 2."""
    Mesh1D(M)
    return Tridiagonal(np.full(M - 1, 4.0 * M), np.full(M - 2, -2.0 * M))


def _aj_entries(M: int, j):
    """Diagonal ``(..., M-1)`` and super-diagonal ``(..., M-2)`` entries of ``A_j``."""
    j = np.asarray(j, dtype=np.int64)[..., None]
    scale = M * M / (np.pi * j.astype(float) ** 2.5)
    # sin(pi r / M) looked up with the phase r reduced exactly mod 2M
    sines = np.sin(np.pi * np.arange(2 * M) / M)
    k = np.arange(1, M, dtype=np.int64)
    diag = scale * sines[2 * j % (2 * M)] * sines[2 * j * k % (2 * M)]
    k = np.arange(1, M - 1, dtype=np.int64)
    off = -scale * sines[j % (2 * M)] * sines[j * (2 * k + 1) % (2 * M)]
    return diag, off


def assemble_Aj(M: int, j: int) -> Tridiagonal:
    """Stiffness matrix of ``psi_j`` in closed form."""
    Mesh1D(M)
    if j < 1:
        raise ValueError(f"j must be >= 1, got {j}")
    diag, off = _aj_entries(M, j)
    return Tridiagonal(diag, off)


def affine_tables(M: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Entries of ``A_1..A_s`` per matrix position: shapes ``(s, M-1)`` and ``(s, M-2)``."""
    if s == 0:
        return np.zeros((0, M - 1)), np.zeros((0, M - 2))
    return _aj_entries(M, np.arange(1, s + 1))


def _uniform_coefficients(M: int, s: int) -> np.ndarray:
    diag, off = affine_tables(M, s)
    return np.hstack([diag, off])


def _split_uniform(M: int, values_t: np.ndarray) -> TridiagonalBatch:
    # values_t: (2M - 3, N), one row per matrix position
    A0 = assemble_A0(M)
    return TridiagonalBatch.from_positions(values_t[:M - 1] + A0.diag[:, None],
                                           values_t[M - 1:] + A0.off[:, None])


def _table(table, build, M: int, s: int) -> np.ndarray:
    if table is None:
        return build(M, s)
    table = np.asarray(table, dtype=float)
    if table.shape[0] != s:
        raise ValueError(f"coefficient table has {table.shape[0]} rows, lattice dimension is {s}")
    return table


def uniform_table(M: int, s: int) -> np.ndarray:
    """Entries of ``A_1..A_s`` at all ``2M - 3`` nonzero positions, shape ``(s, 2M-3)``.

    Columns are the diagonal positions followed by the super-diagonal ones.
    The table depends only on ``(M, s)`` and can be shared across lattices.
    """
    Mesh1D(M)
    return _uniform_coefficients(M, s)


def assemble_uniform_fast(lattice: ReorderedLattice, M: int, *,
                          workers: int | None = None, table=None) -> TridiagonalBatch:
    """``B(y_n)`` for all ``N`` points with ``y_n = x_n - 1/2``.

    Each of the ``2M - 3`` nonzero positions gets ``a_0 + Y a_{k,l}`` from
    one fast lattice product. ``table`` optionally supplies a precomputed
    :func:`uniform_table`.
    """
    Mesh1D(M)
    C = _table(table, uniform_table, M, lattice.s)
    F = FastLatticeMatrix(lattice, Transform.SHIFT_HALF)
    return _split_uniform(M, F.matmat_t(C, workers=workers))


def assemble_uniform_std(lattice: ReorderedLattice, M: int, *, table=None) -> TridiagonalBatch:
    """Same matrices through the dense ``O(M N s)`` product ``Y C``."""
    Mesh1D(M)
    C = _table(table, uniform_table, M, lattice.s)
    Y = naive_points(lattice, Transform.SHIFT_HALF)
    return _split_uniform(M, C.T @ Y.T)


def assemble_uniform_naive(lattice: ReorderedLattice, M: int) -> TridiagonalBatch:
    """``B(y_n) = A_0 + sum_j y_{n,j} A_j`` summed matrix by matrix."""
    Y = naive_points(lattice, Transform.SHIFT_HALF)
    A0 = assemble_A0(M)
    diag = np.tile(A0.diag, (Y.shape[0], 1))
    off = np.tile(A0.off, (Y.shape[0], 1))
    for j in range(1, lattice.s + 1):
        Aj = assemble_Aj(M, j)
        diag += np.outer(Y[:, j - 1], Aj.diag)
        off += np.outer(Y[:, j - 1], Aj.off)
    return TridiagonalBatch(diag, off)


# -- log-normal stiffness matrices -----------------------------------------

def midpoint_rule(M: int) -> tuple[np.ndarray, np.ndarray]:
    """Element midpoints ``(e - 1/2) / M`` and equal weights ``1 / M``."""
    return (np.arange(M) + 0.5) / M, np.full(M, 1.0 / M)


def lognormal_table(M: int, s: int) -> np.ndarray:
    """Values ``psi_j(x_e)`` at the element midpoints, shape ``(s, M)``."""
    Mesh1D(M)
    x, _ = midpoint_rule(M)
    j = np.arange(1, s + 1, dtype=float)[:, None]
    return j ** -1.5 * np.sin(2.0 * np.pi * j * x[None, :])


def _combine_lognormal(M: int, theta_t: np.ndarray) -> TridiagonalBatch:
    # theta_t[e] holds the log-coefficient at the midpoint of element e+1 for
    # every point; phi_k' = +M on element k and -M on element k+1.
    a = np.exp(theta_t)
    return TridiagonalBatch.from_positions(M * (a[:-1] + a[1:]), -M * a[1:-1])


def assemble_lognormal_fast(lattice: ReorderedLattice, M: int, *,
                            drop_zero: bool = True, zero_value: float | None = None,
                            workers: int | None = None, table=None) -> TridiagonalBatch:
    """Midpoint-rule stiffness matrices of ``exp(2 + sum_j y_j psi_j)``.

    The log-coefficient at all ``M`` quadrature nodes and all points is
    ``Theta = 2 + Y Psi``, one fast product per node. Parameters are
    ``y = Phi^{-1}(x)``; row 0 follows the same endpoint policy as
    :func:`fastqmc.gauss.generate_normal`. ``table`` optionally supplies a
    precomputed :func:`lognormal_table`.
    """
    Mesh1D(M)
    T = _table(table, lognormal_table, M, lattice.s)
    F = FastLatticeMatrix(lattice, Transform.INV_NORMAL_CDF,
                          drop_zero=drop_zero, zero_value=zero_value)
    theta_t = PSI0 + F.matmat_t(T, workers=workers)
    return _combine_lognormal(M, theta_t)


def assemble_lognormal_std(lattice: ReorderedLattice, M: int, *,
                           drop_zero: bool = True,
                           zero_value: float | None = None, table=None) -> TridiagonalBatch:
    Mesh1D(M)
    T = _table(table, lognormal_table, M, lattice.s)
    Y = naive_points(lattice, Transform.INV_NORMAL_CDF, drop_zero=drop_zero,
                     zero_value=zero_value)
    return _combine_lognormal(M, PSI0 + T.T @ Y.T)


def assemble_lognormal_naive(lattice: ReorderedLattice, M: int, *,
                             drop_zero: bool = True,
                             zero_value: float | None = None) -> TridiagonalBatch:
    """Entry-by-entry quadrature of ``int a(x, y_n) phi_k' phi_l' dx``.

    For every point and every nonzero pair ``(k, l)`` the midpoint rule is
    applied on the elements shared by the supports of ``phi_k`` and ``phi_l``.
    """
    mesh = Mesh1D(M)
    Y = naive_points(lattice, Transform.INV_NORMAL_CDF, drop_zero=drop_zero,
                     zero_value=zero_value)
    s = lattice.s
    h = 1.0 / M

    def log_coeff(x, y):
        return PSI0 + sum(y[j - 1] * psi(j, x) for j in range(1, s + 1))

    def entry(y, k, l):
        lo, hi = max(k, l), min(k, l) + 1
        total = 0.0
        for e in range(lo, hi + 1):           # elements [x_{e-1}, x_e]
            x = (e - 0.5) * h
            total += h * np.exp(log_coeff(x, y)) * mesh.hat_derivative(k, x) \
                * mesh.hat_derivative(l, x)
        return total

    n_pts = Y.shape[0]
    diag = np.empty((n_pts, M - 1))
    off = np.empty((n_pts, M - 2))
    for n in range(n_pts):
        for k in range(1, M):
            diag[n, k - 1] = entry(Y[n], k, k)
            if k < M - 1:
                off[n, k - 1] = entry(Y[n], k, k + 1)
    return TridiagonalBatch(diag, off)


# -- pipelines --------------------------------------------------------------
#
# Timings are split into phases. "setup" builds the coefficient tables, which
# depend only on (M, s) and are identical for both routes; "assembly",
# "solve" and "mean" are the point-dependent work the routes differ in.

def _setup(build, M: int, s: int):
    t0 = time.perf_counter()
    table = build(M, s)
    return table, time.perf_counter() - t0


def _run(assemble, M: int, setup_time: float):
    t0 = time.perf_counter()
    batch = assemble()
    t1 = time.perf_counter()
    sols = batch.solve(np.ones(M - 1))
    t2 = time.perf_counter()
    mean = mean_solution(sols)
    t3 = time.perf_counter()
    return mean, dict(setup=setup_time, assembly=t1 - t0, solve=t2 - t1, mean=t3 - t2)


def _run_blocked(M, points, assemble_rows, block_rows, setup_time: float):
    # standard route with bounded memory: assemble and solve a block of rows at a time
    if block_rows < 1:
        raise ValueError("block_rows must be >= 1")
    timings = dict(setup=setup_time, assembly=0.0, solve=0.0, mean=0.0)
    total = np.zeros(M - 1)
    count = 0
    t0 = time.perf_counter()
    Y = points()
    timings["assembly"] += time.perf_counter() - t0
    for lo in range(0, Y.shape[0], block_rows):
        t0 = time.perf_counter()
        batch = assemble_rows(Y[lo:lo + block_rows])
        t1 = time.perf_counter()
        sols = batch.solve(np.ones(M - 1))
        t2 = time.perf_counter()
        total += sols.sum(axis=0)
        count += sols.shape[0]
        timings["assembly"] += t1 - t0
        timings["solve"] += t2 - t1
        timings["mean"] += time.perf_counter() - t2
    return total / count, timings


def solve_uniform(lattice: ReorderedLattice, M: int, method: str = "fast", *,
                  workers: int | None = None, block_rows: int | None = None,
                  table=None):
    """Mean FEM coefficient vector over all QMC points, affine coefficient.

    Returns ``(mean, timings)`` where ``timings`` maps phase name
    (``setup``, ``assembly``, ``solve``, ``mean``) to seconds. A supplied
    ``table`` skips the setup phase. ``block_rows`` streams the standard
    route through bounded memory.
    """
    if method not in ("fast", "std"):
        raise ValueError(f"unknown method {method!r}")
    Mesh1D(M)
    if table is None:
        table, t_setup = _setup(uniform_table, M, lattice.s)
    else:
        table, t_setup = _table(table, uniform_table, M, lattice.s), 0.0
    if method == "fast":
        return _run(lambda: assemble_uniform_fast(lattice, M, workers=workers, table=table),
                    M, t_setup)
    if block_rows is None:
        return _run(lambda: assemble_uniform_std(lattice, M, table=table), M, t_setup)
    return _run_blocked(M, lambda: naive_points(lattice, Transform.SHIFT_HALF),
                        lambda Yb: _split_uniform(M, table.T @ Yb.T), block_rows, t_setup)


def solve_lognormal(lattice: ReorderedLattice, M: int, method: str = "fast", *,
                    drop_zero: bool = True, zero_value: float | None = None,
                    workers: int | None = None, block_rows: int | None = None,
                    table=None):
    """Mean FEM coefficient vector for the log-normal coefficient."""
    if method not in ("fast", "std"):
        raise ValueError(f"unknown method {method!r}")
    Mesh1D(M)
    kw = dict(drop_zero=drop_zero, zero_value=zero_value)
    if table is None:
        table, t_setup = _setup(lognormal_table, M, lattice.s)
    else:
        table, t_setup = _table(table, lognormal_table, M, lattice.s), 0.0
    if method == "fast":
        return _run(lambda: assemble_lognormal_fast(lattice, M, workers=workers,
                                                    table=table, **kw), M, t_setup)
    if block_rows is None:
        return _run(lambda: assemble_lognormal_std(lattice, M, table=table, **kw), M, t_setup)
    return _run_blocked(
        M,
        lambda: naive_points(lattice, Transform.INV_NORMAL_CDF, **kw),
        lambda Yb: _combine_lognormal(M, PSI0 + table.T @ Yb.T), block_rows, t_setup)
