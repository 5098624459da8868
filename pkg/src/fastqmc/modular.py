"""Modular arithmetic for prime moduli.

Everything needed to reorder a lattice: primality, primitive roots,
modular inverses and discrete logarithms with respect to a primitive root.
All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PrimitiveRoot",
    "pow_mod",
    "is_prime",
    "factorize",
    "mod_inverse",
    "is_primitive_root",
    "primitive_root",
    "discrete_log_exponent",
    "exponent_table",
]

# Deterministic Miller-Rabin bases, valid for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# Above this modulus exponent_table refuses to build a full table.
TABLE_LIMIT = 1 << 20


@dataclass(frozen=True)
class PrimitiveRoot:
    """A generator ``beta`` of the multiplicative group mod prime ``N``."""

    N: int
    beta: int
    beta_inv: int

    def __int__(self) -> int:
        return self.beta


def pow_mod(base: int, exponent: int, N: int) -> int:
    """Return ``base**exponent mod N`` in ``{0, ..., N-1}``."""
    if N < 2:
        raise ValueError(f"modulus must be >= 2, got {N}")
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    return pow(int(base), int(exponent), int(N))


def is_prime(N: int) -> bool:
    """Deterministic primality test (Miller-Rabin with fixed bases)."""
    N = int(N)
    if N < 2:
        return False
    for p in _MR_BASES:
        if N % p == 0:
            return N == p
    d, r = N - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, N)
        if x == 1 or x == N - 1:
            continue
        for _ in range(r - 1):
            x = x * x % N
            if x == N - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of ``n >= 1`` by trial division."""
    if n < 1:
        raise ValueError("n must be positive")
    factors: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def _check_prime(N: int) -> None:
    if not is_prime(N):
        raise ValueError(f"modulus {N} is not prime")


def mod_inverse(a: int, N: int) -> int:
    """Multiplicative inverse of ``a`` modulo ``N``, in ``{1, ..., N-1}``."""
    if N < 2:
        raise ValueError(f"modulus must be >= 2, got {N}")
    if a % N == 0:
        raise ValueError(f"{a} has no inverse modulo {N}")
    if math.gcd(a, N) != 1:
        raise ValueError(f"{a} and {N} are not coprime")
    return pow(int(a), -1, int(N))


def is_primitive_root(beta: int, N: int) -> bool:
    """True iff ``beta`` generates the multiplicative group mod prime ``N``."""
    beta %= N
    if beta == 0:
        return False
    if N == 2:
        return beta == 1
    order = N - 1
    return all(pow(beta, order // q, N) != 1 for q in factorize(order))


def primitive_root(N: int) -> PrimitiveRoot:
    """Smallest primitive root ``beta >= 2`` modulo the prime ``N``.

    The smallest root is chosen so that point orderings are reproducible.
    """
    N = int(N)
    if N < 3:
        raise ValueError(f"modulus must be a prime >= 3, got {N}")
    _check_prime(N)
    order = N - 1
    cofactors = [order // q for q in factorize(order)]
    for beta in range(2, N):
        if all(pow(beta, e, N) != 1 for e in cofactors):
            return PrimitiveRoot(N, beta, pow(beta, -1, N))
    raise AssertionError("unreachable: prime modulus has a primitive root")


def discrete_log_exponent(N: int, beta: int | PrimitiveRoot, g: int) -> int:
    """Return ``c`` in ``{1, ..., N-1}`` with ``beta**(c-1) = g (mod N)``.

    Baby-step giant-step, O(sqrt(N)) time and memory.
    """
    b = int(beta)
    g = int(g) % N
    if g == 0:
        raise ValueError(f"g must be nonzero modulo {N}")
    order = N - 1
    m = math.isqrt(order)
    if m * m < order:
        m += 1
    baby: dict[int, int] = {}
    x = 1
    for j in range(m):
        baby.setdefault(x, j)
        x = x * b % N
    giant = pow(b, -m, N)
    y = g
    for i in range(m + 1):
        j = baby.get(y)
        if j is not None:
            return (i * m + j) % order + 1
        y = y * giant % N
    raise ValueError(f"{g} is not a power of {b} modulo {N}; is beta primitive?")


def exponent_table(N: int, beta: int | PrimitiveRoot) -> np.ndarray:
    """Table ``t`` with ``t[g] = c`` such that ``beta**(c-1) = g (mod N)``.

    ``t[0]`` is unused and set to 0. Limited to ``N <= 2**20``.
    """
    if N > TABLE_LIMIT:
        raise ValueError(f"exponent table limited to N <= {TABLE_LIMIT}")
    b = int(beta)
    table = np.zeros(N, dtype=np.int64)
    x = 1
    for k in range(1, N):
        if table[x]:
            raise ValueError(f"{b} is not a primitive root modulo {N}")
        table[x] = k
        x = x * b % N
    return table
