"""Reordering a rank-1 lattice so its point matrix becomes circulant.

A smallest primitive root beta of N turns the index set 1..N-1 into powers
of beta. Listing the points in that order makes the (N-1) x s point matrix a
circulant matrix times a column selection.
"""
import numpy as np

from fastqmc import FastLatticeMatrix, GeneratingVector, reorder_lattice

gv = GeneratingVector(7, (1, 5, 3))
L = reorder_lattice(gv)
print("primitive root", L.beta, "inverse", L.root.beta_inv)
print("exponents c =", L.c)

# numerators N * x_n, one row per point, origin first
print(L.numerator_matrix())

F = FastLatticeMatrix(L)
Z = np.rint(F.circulant.dense() * 7).astype(int)
P = F.selection.dense().astype(int)
print("Z (times N):\n", Z)
print("P:\n", P)
print("Z P reproduces rows 1..6:", np.array_equal(Z @ P, L.numerator_matrix()[1:]))
