"""Fast products Y a with the lattice point matrix.

The fast route costs O(N log N) per column instead of O(N s). The two routes
agree to rounding error for every coordinate transform.
"""
import time

import numpy as np
from threadpoolctl import threadpool_limits

from fastqmc import FastLatticeMatrix, Transform, cbc_construct, naive_matmat, reorder_lattice

rng = np.random.default_rng(0)
s, t = 1000, 4
A = rng.standard_normal((s, t))

with threadpool_limits(1):
    for N in (1021, 4001, 16001):
        L = reorder_lattice(cbc_construct(N, s, allow_repeats=s >= N))
        F = FastLatticeMatrix(L, Transform.TENT)
        t0 = time.perf_counter()
        fast = F.matmat(A)
        t1 = time.perf_counter()
        slow = naive_matmat(L, Transform.TENT, A)
        t2 = time.perf_counter()
        print(f"N={N:6d}  fast {t1 - t0:.4f}s  naive {t2 - t1:.4f}s  "
              f"max diff {np.abs(fast - slow).max():.1e}")

# the inverse normal transform cannot map the origin; drop that row
L = reorder_lattice(cbc_construct(127, 10))
F = FastLatticeMatrix(L, Transform.INV_NORMAL_CDF, drop_zero=True)
print("invnorm matrix shape", F.shape)
