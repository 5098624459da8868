"""Rank-1 lattice point sets in the primitive-root ordering.

A lattice with prime ``N`` points and generating vector ``g`` is normally
enumerated as ``x_n = {n g / N}``. Writing ``g_j = beta**(c_j - 1)`` for a
primitive root ``beta`` and enumerating ``n`` through the powers of
``beta**-1`` gives the ordering

    x_0 = 0,   x_n[j] = {beta**(c_j - n) / N}   (n = 1, ..., N-1),

in which rows ``1..N-1`` of the point matrix are columns ``c_1, ..., c_s``
of a single circulant matrix. This module builds those orderings, the
analogous ordering of the union of all Korobov lattices, the coordinate
transforms, and generating vectors by component-by-component search.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import modular
from .normal import inv_normal_cdf
from .spectral import CirculantOperator

__all__ = [
    "Transform",
    "apply_transform",
    "GeneratingVector",
    "ReorderedLattice",
    "KorobovPSet",
    "conventional_lattice_point",
    "reorder_lattice",
    "reordered_point",
    "reordered_numerators",
    "beta_powers",
    "korobov_pset",
    "korobov_exponents",
    "korobov_pset_point",
    "korobov_numerators",
    "omega",
    "worst_case_error",
    "cbc_construct",
    "parse_generating_vector",
    "format_generating_vector",
    "load_generating_vector",
    "save_generating_vector",
]


class Transform(enum.Enum):
    """Univariate map applied to every coordinate of every point."""

    IDENTITY = "identity"
    SHIFT_HALF = "shift_half"
    TENT = "tent"
    INV_NORMAL_CDF = "inv_normal_cdf"

    @classmethod
    def parse(cls, name: "str | Transform") -> "Transform":
        if isinstance(name, Transform):
            return name
        key = str(name).strip().lower().replace("-", "_")
        aliases = {"shift": "shift_half", "invnorm": "inv_normal_cdf",
                   "inv_normal": "inv_normal_cdf", "ppf": "inv_normal_cdf"}
        return cls(aliases.get(key, key))

    @property
    def cli_name(self) -> str:
        return {"shift_half": "shift", "inv_normal_cdf": "invnorm"}.get(self.value, self.value)

    @property
    def at_zero(self) -> float:
        """Value of the map at 0 (``-inf`` for the inverse normal CDF)."""
        if self is Transform.INV_NORMAL_CDF:
            return -np.inf
        return float(self(0.0))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self is Transform.IDENTITY:
            out = x.copy()
        elif self is Transform.SHIFT_HALF:
            out = x - 0.5
        elif self is Transform.TENT:
            out = 1.0 - np.abs(2.0 * x - 1.0)
        else:
            if np.any((x <= 0.0) | (x >= 1.0)):
                raise ValueError(
                    "inverse normal CDF is unbounded at 0 and 1; "
                    "drop or substitute the endpoint first"
                )
            out = np.asarray(inv_normal_cdf(x), dtype=float)
        return float(out) if out.ndim == 0 else out


def apply_transform(t: Transform | str, x: float) -> float:
    return Transform.parse(t)(x)


@dataclass(frozen=True)
class GeneratingVector:
    """Generating vector ``(g_1, ..., g_s)`` of a prime-``N`` lattice."""

    N: int
    g: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(int(v) for v in self.g))
        if not modular.is_prime(self.N):
            raise ValueError(f"number of points {self.N} is not prime")
        bad = [v for v in self.g if not 1 <= v <= self.N - 1]
        if bad:
            raise ValueError(f"generating vector components {bad} outside 1..{self.N - 1}")

    @property
    def s(self) -> int:
        return len(self.g)

    def points(self) -> np.ndarray:
        """All ``N`` points in the conventional order ``n = 0, ..., N-1``."""
        n = np.arange(self.N, dtype=np.int64)[:, None]
        return (n * np.asarray(self.g, dtype=np.int64)[None, :] % self.N) / self.N


@dataclass(frozen=True)
class ReorderedLattice:
    """Lattice stored as a primitive root plus column exponents ``c_j``."""

    N: int
    root: modular.PrimitiveRoot
    c: tuple[int, ...]
    g: tuple[int, ...] = ()

    @property
    def s(self) -> int:
        return len(self.c)

    @property
    def beta(self) -> int:
        return self.root.beta

    def point(self, n: int) -> np.ndarray:
        return reordered_point(self, n)

    def numerator_matrix(self) -> np.ndarray:
        """Integer matrix ``N * x_n[j]`` for all ``n``, from the exponent formula."""
        pw = beta_powers(self.N, self.beta)
        m = self.N - 1
        n = np.arange(1, self.N)[:, None]
        c = np.asarray(self.c, dtype=np.int64)[None, :]
        rows = pw[(c - n) % m]
        return np.vstack([np.zeros((1, self.s), dtype=np.int64), rows])

    def points(self) -> np.ndarray:
        return self.numerator_matrix() / self.N


@dataclass(frozen=True)
class KorobovPSet:
    """Union of all Korobov lattices with prime ``K``: ``(K-1)**2`` points."""

    K: int
    s: int
    root: modular.PrimitiveRoot = field(repr=False)

    @property
    def N(self) -> int:
        return (self.K - 1) ** 2

    @property
    def beta(self) -> int:
        return self.root.beta


def beta_powers(N: int, beta: int) -> np.ndarray:
    """``beta**k mod N`` for ``k = 0, ..., N-2``."""
    out = np.empty(N - 1, dtype=np.int64)
    x = 1
    for k in range(N - 1):
        out[k] = x
        x = x * beta % N
    return out


def conventional_lattice_point(gv: GeneratingVector, n: int) -> np.ndarray:
    if not 0 <= n < gv.N:
        raise IndexError(f"point index {n} outside 0..{gv.N - 1}")
    return np.array([n * gj % gv.N for gj in gv.g], dtype=float) / gv.N


def reorder_lattice(gv: GeneratingVector) -> ReorderedLattice:
    """Primitive root and exponents with ``g_j = beta**(c_j - 1) mod N``."""
    root = modular.primitive_root(gv.N)
    if gv.N <= modular.TABLE_LIMIT and gv.s > 8:
        table = modular.exponent_table(gv.N, root.beta)
        c = tuple(int(table[gj]) for gj in gv.g)
    else:
        c = tuple(modular.discrete_log_exponent(gv.N, root, gj) for gj in gv.g)
    return ReorderedLattice(gv.N, root, c, gv.g)


def reordered_numerators(L: ReorderedLattice, n: int) -> tuple[int, ...]:
    """Integers ``N * x_n[j]`` of the ``n``-th reordered point."""
    if not 0 <= n < L.N:
        raise IndexError(f"point index {n} outside 0..{L.N - 1}")
    if n == 0:
        return (0,) * L.s
    m = L.N - 1
    return tuple(pow(L.beta, (cj - n) % m, L.N) for cj in L.c)


def reordered_point(L: ReorderedLattice, n: int) -> np.ndarray:
    return np.array(reordered_numerators(L, n), dtype=float) / L.N


def korobov_pset(K: int, s: int) -> KorobovPSet:
    if s < 1:
        raise ValueError("dimension must be at least 1")
    return KorobovPSet(K, s, modular.primitive_root(K))


def korobov_exponents(P: KorobovPSet, g: int) -> tuple[int, ...]:
    """Column exponents ``c_{g,j} = (j-1)(g-1) + 1`` reduced into ``1..K-1``."""
    if not 1 <= g <= P.K - 1:
        raise IndexError(f"block index {g} outside 1..{P.K - 1}")
    m = P.K - 1
    return tuple(((j - 1) * (g - 1) + 1 - 1) % m + 1 for j in range(1, P.s + 1))


def korobov_numerators(P: KorobovPSet, n: int, g: int) -> tuple[int, ...]:
    if not 1 <= n <= P.K - 1:
        raise IndexError(f"point index {n} outside 1..{P.K - 1}")
    m = P.K - 1
    return tuple(pow(P.beta, (c - n) % m, P.K) for c in korobov_exponents(P, g))


def korobov_pset_point(P: KorobovPSet, n: int, g: int) -> np.ndarray:
    return np.array(korobov_numerators(P, n, g), dtype=float) / P.K


# -- component-by-component construction ------------------------------------

def omega(x):
    """Kernel ``2 pi^2 (x^2 - x + 1/6)`` of the Korobov space with alpha = 2."""
    x = np.asarray(x, dtype=float)
    return 2.0 * np.pi ** 2 * (x * x - x + 1.0 / 6.0)


def _default_weights(s: int) -> np.ndarray:
    return 1.0 / np.arange(1, s + 1, dtype=float) ** 2


def worst_case_error(gv: GeneratingVector, gamma=None) -> float:
    """Squared worst-case error of the lattice rule, by direct summation."""
    gamma = _default_weights(gv.s) if gamma is None else np.asarray(gamma, dtype=float)
    prod = np.ones(gv.N)
    n = np.arange(gv.N, dtype=np.int64)
    for gj, wj in zip(gv.g, gamma):
        prod *= 1.0 + wj * omega((n * gj % gv.N) / gv.N)
    return float(prod.mean() - 1.0)


def _pick(values: np.ndarray, candidates: np.ndarray) -> int:
    # Exact ties (e.g. g and N - g) differ by rounding only; take the smallest g.
    vmin = values.min()
    near = values <= vmin + 1e-11 * abs(vmin)
    return int(candidates[near].min())


def cbc_construct(N: int, s: int, gamma=None, *, method: str = "fast",
                  allow_repeats: bool = False) -> GeneratingVector:
    """Greedy component-by-component generating vector.

    Minimizes the squared worst-case error

        e^2(g) = -1 + (1/N) sum_n prod_j (1 + gamma_j omega({n g_j / N}))

    one component at a time, ties going to the smallest candidate.

    Parameters
    ----------
    N : int
        Prime number of points.
    s : int
        Dimension.
    gamma : array_like, optional
        Product weights, default ``1/j**2``.
    method : {"fast", "plain"}
        ``"fast"`` evaluates all candidates at once with one circulant
        product per component (O(N log N)); ``"plain"`` is the O(N^2) loop.
    allow_repeats : bool
        Dimensions ``s >= N`` force repeated components and are refused
        unless this is set.
    """
    if not modular.is_prime(N):
        raise ValueError(f"number of points {N} is not prime")
    if s < 0:
        raise ValueError("dimension must be nonnegative")
    if s >= N and not allow_repeats:
        raise ValueError(f"dimension s={s} >= N={N}; pass allow_repeats=True to permit this")
    gamma = _default_weights(s) if gamma is None else np.asarray(gamma, dtype=float)
    if gamma.shape != (s,) or np.any(gamma <= 0):
        raise ValueError("need s positive weights")
    if method not in ("fast", "plain"):
        raise ValueError(f"unknown CBC method {method!r}")

    n = np.arange(N, dtype=np.int64)
    q = np.ones(N)
    g: list[int] = []
    if method == "fast":
        root = modular.primitive_root(N)
        pw = beta_powers(N, root.beta)
        m = N - 1
        zt = CirculantOperator(omega(pw / N)).transpose()
        rows = pw[(-np.arange(m)) % m]          # row i <-> n = beta**-i
        omega0 = float(omega(0.0))
        for j in range(s):
            corr = zt.apply(q[rows])            # indexed by candidate g = beta**c
            values = q.sum() + gamma[j] * (q[0] * omega0 + corr)
            gj = _pick(values, pw)
            g.append(gj)
            q *= 1.0 + gamma[j] * omega((n * gj % N) / N)
    else:
        cand = np.arange(1, N, dtype=np.int64)
        for j in range(s):
            values = np.empty(N - 1)
            for lo in range(0, N - 1, 256):
                cc = cand[lo:lo + 256]
                w = omega((cc[:, None] * n[None, :] % N) / N)
                values[lo:lo + 256] = (q[None, :] * (1.0 + gamma[j] * w)).sum(axis=1)
            gj = _pick(values, cand)
            g.append(gj)
            q *= 1.0 + gamma[j] * omega((n * gj % N) / N)
    return GeneratingVector(N, tuple(g))


# -- plain-text generating vectors -------------------------------------------

def parse_generating_vector(text: str, N: int | None = None) -> GeneratingVector:
    """Parse ``"N s\\n g_1 ... g_s"``, or a bare component list when ``N`` is given."""
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty generating vector")
    try:
        if len(lines) == 1:
            if N is None:
                raise ValueError("bare component list needs N")
            n_pts, comps = N, tuple(int(v) for v in lines[0])
            s = len(comps)
        else:
            if len(lines) != 2 or len(lines[0]) != 2:
                raise ValueError("expected header line 'N s' and one line of components")
            n_pts, s = (int(v) for v in lines[0])
            comps = tuple(int(v) for v in lines[1])
    except ValueError as exc:
        raise ValueError(f"malformed generating vector: {exc}") from None
    if len(comps) != s:
        raise ValueError(f"header announces s={s} but {len(comps)} components follow")
    if N is not None and N != n_pts:
        raise ValueError(f"generating vector is for N={n_pts}, expected N={N}")
    return GeneratingVector(n_pts, comps)


def format_generating_vector(gv: GeneratingVector) -> str:
    return f"{gv.N} {gv.s}\n{' '.join(str(v) for v in gv.g)}\n"


def load_generating_vector(path: str | os.PathLike, N: int | None = None) -> GeneratingVector:
    with open(path) as fh:
        return parse_generating_vector(fh.read(), N)


def save_generating_vector(gv: GeneratingVector, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(format_generating_vector(gv))


def as_fractions(numerators, N: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(v), N) for v in numerators)
