import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from threadpoolctl import threadpool_limits

from fastqmc.fastmv import (
    FastLatticeMatrix,
    KorobovFastMatrix,
    SelectionMap,
    fast_matmat,
    fast_matvec,
    korobov_fast_matmat,
    korobov_naive_matmat,
    korobov_naive_points,
    naive_matmat,
    naive_matvec,
    naive_points,
    scatter,
)
from fastqmc.lattice import GeneratingVector, Transform, korobov_pset, reorder_lattice
from fastqmc.modular import is_prime

PRIMES = [p for p in range(3, 102) if is_prime(p)]


def random_lattice(rng, N, s):
    return reorder_lattice(GeneratingVector(N, tuple(int(v) for v in rng.integers(1, N, size=s))))


def test_worked_example_factorization():
    L = reorder_lattice(GeneratingVector(7, (1, 5, 3)))
    F = FastLatticeMatrix(L, Transform.IDENTITY)
    P = np.zeros((6, 3))
    P[0, 0] = P[5, 1] = P[1, 2] = 1          # rows c_j = 1, 6, 2
    assert np.array_equal(F.selection.dense(), P)
    assert np.array_equal(F.circulant.base * 7, [1, 3, 2, 6, 4, 5])
    expected = np.array([(1, 5, 3), (5, 4, 1), (4, 6, 5), (6, 2, 4), (2, 3, 6), (3, 1, 2)])
    assert np.array_equal(F.circulant.dense() @ P * 7, expected)
    # a = (7, 7, 7): row sums of the numerators
    y = F.matvec(np.full(3, 7.0))
    assert np.allclose(y, [0, 9, 10, 15, 12, 11, 6], atol=1e-12)


@pytest.mark.parametrize("N", PRIMES)
def test_factorization_identity(N):
    rng = np.random.default_rng(N)
    L = random_lattice(rng, N, int(rng.integers(1, 12)))
    for t in Transform:
        kw = dict(drop_zero=True) if t is Transform.INV_NORMAL_CDF else {}
        F = FastLatticeMatrix(L, t, **kw)
        ZP = F.circulant.dense() @ F.selection.dense()
        Y = naive_points(L, t, **kw)
        Yp = Y if t is Transform.INV_NORMAL_CDF else Y[1:]
        if t is Transform.IDENTITY:
            assert np.array_equal(np.rint(ZP * N), np.rint(Yp * N))
            assert np.array_equal(ZP, Yp)
        else:
            assert np.max(np.abs(ZP - Yp)) <= 1e-12
        assert np.max(np.abs(F.dense() - Y)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([11, 13, 101, 257, 509, 1021, 2003, 4001]), st.integers(1, 400),
       st.integers(1, 10), st.sampled_from(list(Transform)), st.integers(0, 2**32 - 1))
def test_fast_matches_naive(N, s, t, transform, seed):
    rng = np.random.default_rng(seed)
    L = random_lattice(rng, N, s)
    kw = dict(drop_zero=transform is Transform.INV_NORMAL_CDF)
    F = FastLatticeMatrix(L, transform, **kw)
    A = rng.uniform(-1, 1, size=(s, t))
    assert np.max(np.abs(F.matmat(A) - naive_matmat(L, transform, A, **kw))) <= 1e-9
    a = A[:, 0]
    assert np.max(np.abs(fast_matvec(F, a) - naive_matvec(L, transform, a, **kw))) <= 1e-9


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([7, 31, 127, 509]), st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_linearity(N, s, seed):
    rng = np.random.default_rng(seed)
    F = FastLatticeMatrix(random_lattice(rng, N, s), Transform.TENT)
    a, b = rng.standard_normal(s), rng.standard_normal(s)
    al, be = rng.standard_normal(2)
    lhs = F.matvec(al * a + be * b)
    rhs = al * F.matvec(a) + be * F.matvec(b)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_row_zero_policy():
    rng = np.random.default_rng(0)
    L = random_lattice(rng, 13, 4)
    a = rng.standard_normal(4)
    # identity: phi(0) = 0
    assert FastLatticeMatrix(L).matvec(a)[0] == 0.0
    # shift: phi(0) = -1/2
    assert FastLatticeMatrix(L, "shift").matvec(a)[0] == pytest.approx(-0.5 * a.sum())
    # invnorm needs a decision about the origin
    with pytest.raises(ValueError):
        FastLatticeMatrix(L, "invnorm")
    with pytest.raises(ValueError):
        naive_points(L, "invnorm")
    F = FastLatticeMatrix(L, "invnorm", zero_value=-3.0)
    assert F.shape == (13, 4)
    assert F.matvec(a)[0] == pytest.approx(-3.0 * a.sum())
    assert np.allclose(F.dense(), naive_points(L, "invnorm", zero_value=-3.0))
    D = FastLatticeMatrix(L, "invnorm", drop_zero=True)
    assert D.shape == (12, 4)
    assert np.allclose(D.matvec(a), F.matvec(a)[1:])


def test_matmat_layout_and_shapes():
    rng = np.random.default_rng(1)
    L = random_lattice(rng, 31, 5)
    F = FastLatticeMatrix(L, "tent")
    A = rng.standard_normal((5, 4))
    Y = F.matmat(A)
    assert Y.shape == (31, 4)
    assert Y.T.flags["C_CONTIGUOUS"]          # each output column is contiguous
    assert np.allclose(F @ A, fast_matmat(F, A))
    assert np.array_equal(F.matmat_t(A), Y.T)
    with pytest.raises(ValueError):
        F.matmat(rng.standard_normal((4, 4)))
    with pytest.raises(ValueError):
        F.matvec(rng.standard_normal(6))
    with pytest.raises(ValueError):
        naive_matvec(L, "tent", rng.standard_normal(6))


def test_selection_map_scatter_accumulates():
    sel = SelectionMap([1, 3, 3], 4)
    assert np.array_equal(scatter(sel, [1.0, 2.0, 5.0]), [1, 0, 7, 0])
    A = np.arange(6.0).reshape(3, 2)
    assert np.array_equal(sel.scatter(A), sel.dense() @ A)
    assert np.array_equal(sel.scatter_rows(A), (sel.dense() @ A).T)
    with pytest.raises(ValueError):
        SelectionMap([0, 1], 4)
    with pytest.raises(ValueError):
        SelectionMap([1, 5], 4)


def test_repeated_components():
    # g_j repeated gives identical columns
    L = reorder_lattice(GeneratingVector(11, (2, 2, 7)))
    Y = FastLatticeMatrix(L).dense()
    assert np.array_equal(Y[:, 0], Y[:, 1])


def test_deterministic():
    rng = np.random.default_rng(2)
    F = FastLatticeMatrix(random_lattice(rng, 1021, 50), "tent")
    A = rng.standard_normal((50, 3))
    assert np.array_equal(F.matmat(A), F.matmat(A))


# -- Korobov -------------------------------------------------------------------------

def test_korobov_identity_gives_points():
    P = korobov_pset(3, 2)
    Y = korobov_fast_matmat(P, "identity", np.eye(2))
    assert Y.shape == (4, 2)
    assert np.allclose(Y, korobov_naive_points(P))
    assert sorted(map(tuple, np.rint(Y * 3).astype(int).tolist())) == [(1, 1), (1, 2), (2, 1), (2, 2)]


@pytest.mark.parametrize("K", [p for p in PRIMES if p <= 31])
@pytest.mark.parametrize("s", [1, 3, 5])
def test_korobov_fast_matches_naive(K, s):
    rng = np.random.default_rng(K * 10 + s)
    P = korobov_pset(K, s)
    A = rng.standard_normal((s, 3))
    for t in (Transform.IDENTITY, Transform.TENT, Transform.INV_NORMAL_CDF):
        assert np.max(np.abs(korobov_fast_matmat(P, t, A) - korobov_naive_matmat(P, t, A))) <= 1e-10
    a = A[:, 0]
    F = KorobovFastMatrix(P, "tent")
    assert np.allclose(F.matvec(a), korobov_naive_matmat(P, "tent", a[:, None])[:, 0])
    assert F.shape == ((K - 1) ** 2, s)
    assert F.selection(1).indices.tolist() == [1] * s


def test_empirical_scaling_slope():
    # time of fast_matmat at fixed t and s grows like N log N
    Ns = [1021, 2053, 4001, 8009, 16001]
    rng = np.random.default_rng(3)
    times = []
    with threadpool_limits(1):
        for N in Ns:
            F = FastLatticeMatrix(random_lattice(rng, N, 50), "tent")
            A = rng.standard_normal((50, 10))
            best = np.inf
            for _ in range(7):
                t0 = time.perf_counter()
                F.matmat(A)
                best = min(best, time.perf_counter() - t0)
            times.append(best)
    slope = np.polyfit(np.log(Ns), np.log(times), 1)[0]
    assert slope <= 1.35, slope
