import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastqmc.modular import (
    TABLE_LIMIT,
    discrete_log_exponent,
    exponent_table,
    factorize,
    is_prime,
    is_primitive_root,
    mod_inverse,
    pow_mod,
    primitive_root,
)


def trial_division(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


SMALL_PRIMES = [p for p in range(3, 400) if trial_division(p)]


def test_pow_mod_examples():
    assert pow_mod(3, 5, 7) == 5
    assert pow_mod(2, 10, 1021) == 3
    for N in (2, 7, 1021):
        for x in (1, 3, 10):
            if x % N:
                assert pow_mod(x, 0, N) == 1


def test_pow_mod_matches_repeated_multiplication():
    x = 1
    for e in range(50):
        assert pow_mod(12345, e, 2**31 - 1) == x
        x = x * 12345 % (2**31 - 1)


def test_pow_mod_rejects_small_modulus():
    with pytest.raises(ValueError):
        pow_mod(3, 2, 1)
    with pytest.raises(ValueError):
        pow_mod(3, -1, 7)


def test_is_prime_examples():
    assert is_prime(7)
    assert not is_prime(1)
    assert not is_prime(0)
    assert is_prime(16001)
    assert is_prime(2**31 - 1)
    assert not is_prime(3215031751)          # strong pseudoprime to bases 2, 3, 5, 7
    assert is_prime(2**61 - 1)


def test_is_prime_matches_trial_division():
    for n in range(3000):
        assert is_prime(n) == trial_division(n), n


@given(st.integers(min_value=1, max_value=10**9))
def test_factorize_reconstructs(n):
    f = factorize(n)
    prod = 1
    for p, e in f.items():
        assert trial_division(p)
        prod *= p ** e
    assert prod == n


def test_primitive_root_examples():
    r = primitive_root(7)
    assert (r.beta, r.beta_inv) == (3, 5)
    assert primitive_root(3).beta == 2
    assert primitive_root(1021).beta == 10
    assert primitive_root(16001).beta == 3


@pytest.mark.parametrize("N", SMALL_PRIMES[:40])
def test_primitive_root_generates_group(N):
    r = primitive_root(N)
    assert {pow(r.beta, k, N) for k in range(1, N)} == set(range(1, N))
    assert r.beta * r.beta_inv % N == 1
    # smallest: no smaller candidate generates the group
    for b in range(2, r.beta):
        assert len({pow(b, k, N) for k in range(1, N)}) < N - 1
    assert is_primitive_root(r.beta_inv, N)


def test_primitive_root_errors():
    for N in (1, 2, 8, 15, 1001):
        with pytest.raises(ValueError):
            primitive_root(N)


def test_mod_inverse():
    assert mod_inverse(3, 7) == 5
    with pytest.raises(ValueError):
        mod_inverse(14, 7)
    with pytest.raises(ValueError):
        mod_inverse(0, 7)


def test_discrete_log_worked_example():
    # g = (1, 5, 3) with beta = 3: exponents c = (1, 6, 2)
    assert [discrete_log_exponent(7, 3, g) for g in (1, 5, 3)] == [1, 6, 2]


@settings(max_examples=60)
@given(st.sampled_from(SMALL_PRIMES + [1021, 16001, 65537, 2**31 - 1]), st.data())
def test_discrete_log_roundtrip(N, data):
    r = primitive_root(N)
    g = data.draw(st.integers(min_value=1, max_value=N - 1))
    c = discrete_log_exponent(N, r, g)
    assert 1 <= c <= N - 1
    assert pow(r.beta, c - 1, N) == g


def test_discrete_log_rejects_zero_and_non_generator():
    with pytest.raises(ValueError):
        discrete_log_exponent(7, 3, 7)
    with pytest.raises(ValueError):
        discrete_log_exponent(7, 2, 3)       # 2 has order 3 mod 7; 3 is not a power


def test_exponent_table_agrees_with_bsgs():
    N = 509
    r = primitive_root(N)
    t = exponent_table(N, r)
    for g in range(1, N):
        assert t[g] == discrete_log_exponent(N, r, g)
    with pytest.raises(ValueError):
        exponent_table(7, 2)
    with pytest.raises(ValueError):
        exponent_table(TABLE_LIMIT + 7, 3)
