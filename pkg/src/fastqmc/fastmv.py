"""Fast products with QMC point matrices.

For a reordered lattice the rows ``1..N-1`` of the point matrix factor as
``Y' = Z P``: ``Z`` is circulant with first row ``z_k = phi({beta**k / N})``
and ``P`` is a 0/1 selection matrix with a single one in row ``c_j`` of
column ``j``. A product ``Y a`` therefore costs one scatter, two FFTs of
length ``N - 1`` and, for row 0, ``phi(0) * sum(a)``.

The naive counterparts materialize the point matrix from the conventional
enumeration ``{n g / N}`` with ``n`` running through powers of
``beta**-1``; they share nothing with the fast path except the ordering.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse

from .lattice import (
    KorobovPSet,
    ReorderedLattice,
    Transform,
    beta_powers,
    korobov_exponents,
)
from .spectral import CirculantOperator

__all__ = [
    "SelectionMap",
    "FastLatticeMatrix",
    "KorobovFastMatrix",
    "scatter",
    "fast_matvec",
    "fast_matmat",
    "naive_points",
    "naive_matvec",
    "naive_matmat",
    "korobov_fast_matmat",
    "korobov_naive_points",
    "korobov_naive_matmat",
]


class SelectionMap:
    """The matrix ``P`` in ``{0,1}^(m x s)`` with ``P[c_j - 1, j] = 1``."""

    def __init__(self, indices, m: int):
        idx = np.asarray(indices, dtype=np.int64).reshape(-1)
        if idx.size and (idx.min() < 1 or idx.max() > m):
            raise ValueError(f"selection indices must lie in 1..{m}")
        self.indices = idx
        self.m = int(m)
        self.s = idx.size
        self._sparse = scipy.sparse.csr_matrix(
            (np.ones(self.s), (idx - 1, np.arange(self.s))), shape=(self.m, self.s)
        )
        self._sparse_t = self._sparse.T.tocsr()

    def dense(self) -> np.ndarray:
        out = np.zeros((self.m, self.s))
        out[self.indices - 1, np.arange(self.s)] = 1.0
        return out

    def scatter(self, a) -> np.ndarray:
        """``P @ a``; entries sharing an index accumulate."""
        a = np.asarray(a, dtype=float)
        if a.shape[0] != self.s or a.ndim > 2:
            raise ValueError(f"operand has {a.shape[0]} rows, selection expects {self.s}")
        if a.ndim == 1:
            return np.bincount(self.indices - 1, weights=a, minlength=self.m)
        return np.asarray(self._sparse @ a)

    def scatter_rows(self, A) -> np.ndarray:
        """``(P @ A).T`` for an ``(s, t)`` matrix, laid out as ``(t, m)``."""
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != self.s:
            raise ValueError(f"operand has shape {A.shape}, selection expects ({self.s}, t)")
        return np.asarray(A.T @ self._sparse_t)


def scatter(sel: SelectionMap, a) -> np.ndarray:
    return sel.scatter(a)


def _row_zero_value(transform: Transform, drop_zero: bool, zero_value):
    """Value shared by all coordinates of row 0, or None when the row is dropped."""
    if drop_zero:
        return None
    if zero_value is not None:
        return float(zero_value)
    y0 = transform.at_zero
    if not np.isfinite(y0):
        raise ValueError(
            f"{transform.value} is unbounded at the zero point; "
            "use drop_zero=True or supply zero_value"
        )
    return y0


class FastLatticeMatrix:
    """Point matrix ``Y`` of a reordered lattice with fast products.

    Parameters
    ----------
    lattice : ReorderedLattice
    transform : Transform or str
        Map applied to every coordinate.
    drop_zero : bool
        Omit row 0 (the point at the origin); the matrix then has ``N - 1``
        rows. Needed for transforms unbounded at 0 unless ``zero_value``
        is given.
    zero_value : float, optional
        Coordinate value used for row 0 instead of ``phi(0)``.
    """

    def __init__(self, lattice: ReorderedLattice, transform=Transform.IDENTITY, *,
                 drop_zero: bool = False, zero_value: float | None = None):
        self.lattice = lattice
        self.transform = Transform.parse(transform)
        self.drop_zero = drop_zero
        self.row0 = _row_zero_value(self.transform, drop_zero, zero_value)
        N = lattice.N
        self.m = N - 1
        self.base_numerators = beta_powers(N, lattice.beta)
        self.circulant = CirculantOperator(self.transform(self.base_numerators / N))
        self.selection = SelectionMap(lattice.c, self.m)

    @property
    def s(self) -> int:
        return self.lattice.s

    @property
    def n_rows(self) -> int:
        return self.m if self.drop_zero else self.m + 1

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.s)

    def matvec(self, a, workers: int | None = None) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        if a.shape != (self.s,):
            raise ValueError(f"vector has shape {a.shape}, expected ({self.s},)")
        return self.matmat(a[:, None], workers=workers)[:, 0]

    def matmat(self, A, workers: int | None = None) -> np.ndarray:
        """``Y @ A`` for an ``(s, t)`` matrix, one FFT pair per column.

        The result is the transpose view of a C-contiguous ``(t, rows)``
        array, so each output column is contiguous in memory.
        """
        return self.matmat_t(A, workers=workers).T

    def matmat_t(self, A, workers: int | None = None) -> np.ndarray:
        """``(Y @ A).T`` as a C-contiguous ``(t, rows)`` array."""
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != self.s:
            raise ValueError(f"matrix has shape {A.shape}, expected ({self.s}, t)")
        out = np.empty((A.shape[1], self.n_rows))
        body = out if self.drop_zero else out[:, 1:]
        if self.s == 0:
            body[:] = 0.0
        else:
            self.circulant.apply_rows(self.selection.scatter_rows(A), workers=workers, out=body)
        if not self.drop_zero:
            out[:, 0] = 0.0 if self.row0 == 0.0 else self.row0 * A.sum(axis=0)
        return out

    __matmul__ = matmat

    def dense(self) -> np.ndarray:
        """``Z P`` realized densely, with row 0 prepended unless dropped."""
        body = self.circulant.dense() @ self.selection.dense()
        if self.drop_zero:
            return body
        return np.vstack([np.full((1, self.s), self.row0), body])


def fast_matvec(F: FastLatticeMatrix, a, workers: int | None = None) -> np.ndarray:
    return F.matvec(a, workers=workers)


def fast_matmat(F: FastLatticeMatrix, A, workers: int | None = None) -> np.ndarray:
    return F.matmat(A, workers=workers)


def naive_points(lattice: ReorderedLattice, transform=Transform.IDENTITY, *,
                 drop_zero: bool = False, zero_value: float | None = None) -> np.ndarray:
    """Materialize the transformed point matrix in the reordered sequence.

    Row ``n >= 1`` is the conventional point with index ``beta**-(n-1)``,
    i.e. coordinates ``{beta**-(n-1) g_j / N}``.
    """
    transform = Transform.parse(transform)
    row0 = _row_zero_value(transform, drop_zero, zero_value)
    N = lattice.N
    if len(lattice.g) != lattice.s:
        raise ValueError("lattice carries no source generating vector")
    idx = np.empty(N - 1, dtype=np.int64)
    x = 1
    for n in range(N - 1):
        idx[n] = x
        x = x * lattice.root.beta_inv % N
    g = np.asarray(lattice.g, dtype=np.int64)
    body = transform((idx[:, None] * g[None, :] % N) / N).reshape(N - 1, lattice.s)
    if drop_zero:
        return body
    return np.vstack([np.full((1, lattice.s), row0), body])


def naive_matvec(lattice: ReorderedLattice, transform, a, **kw) -> np.ndarray:
    """Row-by-row dot products against the materialized point matrix."""
    Y = naive_points(lattice, transform, **kw)
    a = np.asarray(a, dtype=float)
    if a.shape != (lattice.s,):
        raise ValueError(f"vector has shape {a.shape}, expected ({lattice.s},)")
    return Y @ a


def naive_matmat(lattice: ReorderedLattice, transform, A, **kw) -> np.ndarray:
    Y = naive_points(lattice, transform, **kw)
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != lattice.s:
        raise ValueError(f"matrix has shape {A.shape}, expected ({lattice.s}, t)")
    return Y @ A


class KorobovFastMatrix:
    """Stacked blocks ``Y'_g = Z P_g`` (``g = 1..K-1``) of a Korobov p-set.

    All blocks share one circulant spectrum. Rows are ordered block by
    block, and within block ``g`` by ``n = 1..K-1``.
    """

    def __init__(self, pset: KorobovPSet, transform=Transform.IDENTITY):
        self.pset = pset
        self.transform = Transform.parse(transform)
        K = pset.K
        self.m = K - 1
        self.circulant = CirculantOperator(self.transform(beta_powers(K, pset.beta) / K))
        self.exponents = np.array([korobov_exponents(pset, g) for g in range(1, K)],
                                  dtype=np.int64)
        G, s = self.exponents.shape
        rows = (np.arange(G)[:, None] * self.m + self.exponents - 1).reshape(-1)
        cols = np.tile(np.arange(s), G)
        self._stacked = scipy.sparse.csr_matrix(
            (np.ones(rows.size), (rows, cols)), shape=(G * self.m, s)
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.pset.N, self.pset.s)

    def selection(self, g: int) -> SelectionMap:
        return SelectionMap(self.exponents[g - 1], self.m)

    def matmat(self, A, workers: int | None = None) -> np.ndarray:
        A = np.asarray(A, dtype=float)
        if A.ndim == 1:
            return self.matmat(A[:, None], workers=workers)[:, 0]
        if A.shape[0] != self.pset.s:
            raise ValueError(f"matrix has shape {A.shape}, expected ({self.pset.s}, t)")
        G, m, t = self.m, self.m, A.shape[1]
        scattered = np.asarray(self._stacked @ A).reshape(G, m, t)
        rows = scattered.transpose(0, 2, 1).reshape(G * t, m)
        prod = self.circulant.apply_rows(rows, workers=workers).reshape(G, t, m)
        return prod.transpose(0, 2, 1).reshape(G * m, t)

    matvec = matmat
    __matmul__ = matmat


def korobov_fast_matmat(P: KorobovPSet, transform, A, workers: int | None = None) -> np.ndarray:
    return KorobovFastMatrix(P, transform).matmat(A, workers=workers)


def korobov_naive_points(P: KorobovPSet, transform=Transform.IDENTITY) -> np.ndarray:
    """Points ``{beta**-(n-1) beta**((j-1)(g-1)) / K}`` in block order."""
    transform = Transform.parse(transform)
    K, s = P.K, P.s
    binv = pow(P.beta, -1, K)
    rows = np.empty((P.N, s), dtype=np.int64)
    r = 0
    for g in range(1, K):
        gen = pow(P.beta, g - 1, K)
        for n in range(1, K):
            x = pow(binv, n - 1, K)
            for j in range(s):
                rows[r, j] = x
                x = x * gen % K
            r += 1
    return transform(rows / K).reshape(P.N, s)


def korobov_naive_matmat(P: KorobovPSet, transform, A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.shape[0] != P.s:
        raise ValueError(f"matrix has shape {A.shape}, expected ({P.s}, t)")
    return korobov_naive_points(P, transform) @ A
