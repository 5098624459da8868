"""Mean of a parametric diffusion problem with an affine coefficient.

    -(a(x, y) u')' = g,  a(x, y) = 2 + sum_j y_j j^{-3/2} sin(2 pi j x)

The stiffness matrix of point n is A_0 + sum_j y_{n,j} A_j. Each of the
2M - 3 nonzero positions is one fast lattice product over all points.
"""
import numpy as np
from threadpoolctl import threadpool_limits

from fastqmc import cbc_construct, reorder_lattice, solve_uniform, uniform_table

with threadpool_limits(1):
    for N in (127, 257, 509, 1021):
        M = s = 2 * N
        L = reorder_lattice(cbc_construct(N, s, allow_repeats=True))
        table = uniform_table(M, s)          # shared by both routes
        u_fast, t_fast = solve_uniform(L, M, "fast", table=table)
        u_std, t_std = solve_uniform(L, M, "std", table=table)
        tf = t_fast["assembly"] + t_fast["solve"] + t_fast["mean"]
        ts = t_std["assembly"] + t_std["solve"] + t_std["mean"]
        print(f"N={N:5d}  fast {tf:.3f}s  std {ts:.3f}s  ratio {tf / ts:.2f}  "
              f"max diff {np.abs(u_fast - u_std).max():.1e}")

# the load vector is all ones, so u grows like M; u / M approximates the
# solution for the load g = 1
print("u(1/2) / M =", u_fast[M // 2 - 1] / M)
