"""Normally distributed QMC points with a general covariance matrix.

Points are ``z_n = Phi^{-1}(x_n) A + mu`` with ``A^T A = Sigma``; the product
with ``A`` is done column by column through :class:`FastLatticeMatrix`.
The lattice point at the origin maps to ``-inf`` and is dropped by default,
leaving ``N - 1`` equally weighted points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fastmv import FastLatticeMatrix, naive_points
from .lattice import ReorderedLattice, Transform
from .normal import inv_normal_cdf, normal_cdf

__all__ = [
    "GaussianSpec",
    "inv_normal_cdf",
    "normal_cdf",
    "cholesky_upper",
    "generate_normal",
    "generate_normal_naive",
    "random_upper_factor",
]


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    def __init__(self, pivot: int, value: float):
        super().__init__(f"matrix is not positive definite: pivot {pivot} is {value:.3e}")
        self.pivot = pivot


def cholesky_upper(Sigma) -> np.ndarray:
    """Upper-triangular ``A`` with positive diagonal and ``A.T @ A == Sigma``.

    Raises
    ------
    NotPositiveDefiniteError
        With the 0-based index of the first non-positive pivot.
    """
    S = np.array(Sigma, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("covariance must be a square matrix")
    if not np.allclose(S, S.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(S).max(initial=0.0))):
        raise ValueError("covariance must be symmetric")
    s = S.shape[0]
    A = np.zeros_like(S)
    for k in range(s):
        d = S[k, k] - A[:k, k] @ A[:k, k]
        if not d > 0.0:
            raise NotPositiveDefiniteError(k, d)
        A[k, k] = np.sqrt(d)
        A[k, k + 1:] = (S[k, k + 1:] - A[:k, k] @ A[:k, k + 1:]) / A[k, k]
    return A


@dataclass
class GaussianSpec:
    """Target distribution ``N(mu, A^T A)``."""

    mu: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.A = np.asarray(self.A, dtype=float)
        s = self.mu.shape[0]
        if self.A.shape != (s, s):
            raise ValueError(f"factor has shape {self.A.shape}, expected ({s}, {s})")

    @classmethod
    def from_covariance(cls, Sigma, mu=None) -> "GaussianSpec":
        A = cholesky_upper(Sigma)
        return cls(np.zeros(A.shape[0]) if mu is None else mu, A)

    @property
    def s(self) -> int:
        return self.mu.shape[0]

    @property
    def covariance(self) -> np.ndarray:
        return self.A.T @ self.A


def _check(lattice: ReorderedLattice, spec: GaussianSpec):
    if lattice.s != spec.s:
        raise ValueError(f"lattice dimension {lattice.s} != distribution dimension {spec.s}")


def generate_normal(lattice: ReorderedLattice, spec: GaussianSpec, *,
                    drop_zero: bool = True, zero_value: float | None = None,
                    workers: int | None = None) -> np.ndarray:
    """QMC points of ``N(mu, Sigma)``, one per row.

    With ``drop_zero`` (the default) the output has ``N - 1`` rows. Passing
    ``drop_zero=False`` requires ``zero_value``, the standard-normal
    coordinate used in place of ``Phi^{-1}(0)`` for row 0.
    """
    _check(lattice, spec)
    if not drop_zero and zero_value is None:
        raise ValueError("keeping the zero point needs a finite zero_value")
    F = FastLatticeMatrix(lattice, Transform.INV_NORMAL_CDF,
                          drop_zero=drop_zero, zero_value=zero_value)
    out = F.matmat(spec.A, workers=workers)
    out += spec.mu
    return out


def generate_normal_naive(lattice: ReorderedLattice, spec: GaussianSpec, *,
                          drop_zero: bool = True, zero_value: float | None = None) -> np.ndarray:
    """Same points as :func:`generate_normal`, via the dense O(N s^2) product."""
    _check(lattice, spec)
    if not drop_zero and zero_value is None:
        raise ValueError("keeping the zero point needs a finite zero_value")
    Y = naive_points(lattice, Transform.INV_NORMAL_CDF, drop_zero=drop_zero,
                     zero_value=zero_value)
    return Y @ spec.A + spec.mu


def random_upper_factor(s: int, rng: np.random.Generator) -> np.ndarray:
    """Random upper-triangular factor with diagonal in [1, 2).

    Off-diagonal entries are uniform on [-1, 1), scaled by ``1 / sqrt(s)``
    to keep the covariance well conditioned as ``s`` grows.
    """
    A = np.triu(rng.uniform(-1.0, 1.0, size=(s, s)), 1) / np.sqrt(s)
    A[np.diag_indices(s)] = rng.uniform(1.0, 2.0, size=s)
    return A
