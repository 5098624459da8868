"""Korobov p-sets: all points n (1, g, g^2, ...) / K for n, g in 1..K-1.

For each fixed g the K - 1 points form a reordered rank-1 lattice, so a
product with the (K-1)^2 x s matrix costs K - 1 fast lattice products.
"""
import numpy as np

from fastqmc import korobov_fast_matmat, korobov_naive_matmat, korobov_pset

P = korobov_pset(3, 2)
print("K=3, s=2 numerators:")
print(np.rint(korobov_fast_matmat(P, "identity", np.eye(2)) * 3).astype(int))

rng = np.random.default_rng(1)
P = korobov_pset(101, 30)
A = rng.standard_normal((30, 3))
fast = korobov_fast_matmat(P, "tent", A)
print("K=101, s=30: shape", fast.shape,
      "max diff to naive", np.abs(fast - korobov_naive_matmat(P, "tent", A)).max())
