"""The same problem with a log-normal coefficient a = exp(2 + sum_j y_j psi_j).

The log-coefficient at all midpoint quadrature nodes and all points is one
fast product per node. y = Phi^{-1}(x) is undefined at the origin, which is
dropped.
"""
import numpy as np

from fastqmc import cbc_construct, reorder_lattice, solve_lognormal

prev = None
for N in (67, 127, 257, 509):
    M = 2 * N
    L = reorder_lattice(cbc_construct(N, 2 * N, allow_repeats=True))
    u, timings = solve_lognormal(L, M)
    x = np.r_[0, np.arange(1, M) / M, 1]
    grid = np.linspace(0, 1, 1001)
    v = np.interp(grid, x, np.r_[0, u, 0]) / M
    gap = "" if prev is None else f"  gap to previous {np.abs(v - prev).max():.2e}"
    print(f"N={N:4d}  max u/M = {v.max():.6f}{gap}")
    prev = v
