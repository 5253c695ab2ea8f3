import math
import random

import numpy as np
import pytest
from sympy import divisor_count, divisor_sigma, factorint, isprime, primerange, totient

from primeruns import arith
from primeruns.config import Limits
from primeruns.errors import ConfigurationError, UsageError


def oracle_values(n):
    f = factorint(n)
    return arith.ArithValues(int(totient(n)), int(divisor_sigma(n)), len(f),
                             sum(f.values()), int(divisor_count(n)))


def digit_sum_str(n, g):
    s = 0
    while n:
        s += n % g
        n //= g
    return s


def test_arith_values_small():
    t = arith.build_factor_table(5000)
    for n in range(1, 5001):
        assert arith.arith_values(arith.factorize(n, t)) == oracle_values(n)


def test_arith_values_one():
    t = arith.build_factor_table(10)
    assert arith.factorize(1, t).pairs == ()
    assert arith.arith_values(arith.factorize(1, t)) == (1, 1, 0, 0, 1)


def squarefree_mask(limit):
    mask = np.ones(limit + 1, dtype=bool)
    for p in primerange(2, math.isqrt(limit) + 1):
        mask[p * p::p * p] = False
    return mask


def sieved_oracle(limit):
    """phi, sigma, omega, varrho, tau for 0..limit by additive divisor sieves."""
    n = np.arange(limit + 1, dtype=np.int64)
    phi = n.copy()
    sigma = np.zeros(limit + 1, dtype=np.int64)
    tau = np.zeros(limit + 1, dtype=np.int64)
    omega = np.zeros(limit + 1, dtype=np.int64)
    varrho = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        sigma[d::d] += d
        tau[d::d] += 1
    for p in primerange(2, limit + 1):
        phi[p::p] -= phi[p::p] // p
        omega[p::p] += 1
        q = p
        while q <= limit:
            varrho[q::q] += 1
            q *= p
    return phi, sigma, omega, varrho, tau


def test_divisor_count_between_powers():
    limit = 10**5
    seg = arith.segment_values(1, limit + 1)
    squarefree = squarefree_mask(limit)[1:]
    low = 2 ** seg.omega
    high = 2 ** seg.varrho
    assert (low <= seg.tau).all() and (seg.tau <= high).all()
    assert ((seg.tau == low) == squarefree).all()
    assert ((seg.tau == high) == squarefree).all()


def test_squarefull_part_sweep():
    limit = 10**5
    t = arith.build_factor_table(limit)
    squarefree = squarefree_mask(limit)
    for n in range(1, limit + 1):
        f = arith.factorize(n, t)
        q = arith.squarefull_part(f)
        assert n % q == 0
        assert math.gcd(q, n // q) == 1
        assert (q == 1) == squarefree[n] == arith.is_squarefree(f)


@pytest.mark.slow
def test_arith_values_exhaustive():
    limit = 10**6
    phi, sigma, omega, varrho, tau = sieved_oracle(limit)
    t = arith.build_factor_table(limit)
    seg = arith.segment_values(1, limit + 1)
    for name, expected in zip(arith.ArithValues._fields, (phi, sigma, omega, varrho, tau)):
        assert (getattr(seg, name) == expected[1:]).all(), name
    for n in range(1, limit + 1):
        v = arith.arith_values(arith.factorize(n, t))
        assert v == (phi[n], sigma[n], omega[n], varrho[n], tau[n])


@pytest.mark.slow
def test_arith_values_table_against_segment_sieve():
    limit = 10**6
    t = arith.build_factor_table(limit)
    seg = arith.segment_values(1, limit + 1)
    rng = random.Random(1)
    for n in rng.sample(range(1, limit + 1), 3000):
        assert seg.row(n) == oracle_values(n)
    for n in range(1, limit + 1, 97):
        assert arith.arith_values(arith.factorize(n, t)) == seg.row(n)


def test_segment_values_matches_oracle():
    lo, hi = 99000, 100000
    seg = arith.segment_values(lo, hi)
    for n in range(lo, hi):
        assert seg.row(n) == oracle_values(n)


def test_segment_values_bad_range():
    with pytest.raises(UsageError):
        arith.segment_values(0, 10)
    with pytest.raises(UsageError):
        arith.segment_values(10, 5)


def test_factorize_range():
    t = arith.build_factor_table(100)
    with pytest.raises(UsageError):
        arith.factorize(101, t)
    with pytest.raises(UsageError):
        arith.factorize(0, t)


def test_factor_table_budget():
    with pytest.raises(ConfigurationError):
        arith.build_factor_table(1000, Limits(max_table_limit=999))
    with pytest.raises(ConfigurationError):
        arith.build_factor_table(1)


def test_factor_table_primes():
    t = arith.build_factor_table(1000)
    assert t.primes.tolist() == list(primerange(2, 1001))
    assert t.is_prime(997) and not t.is_prime(999) and not t.is_prime(1)


def test_factorize_any():
    t = arith.build_factor_table(1000)
    n = 997 * 991 * 4
    assert arith.factorize_any(n, t).pairs == ((2, 2), (991, 1), (997, 1))
    # 1000003 is prime
    assert arith.factorize_any(2 * 1000003, t).pairs == ((2, 1), (1000003, 1))


def test_squarefull_part():
    t = arith.build_factor_table(1000)
    assert arith.squarefull_part(arith.factorize(72, t)) == 72
    assert arith.squarefull_part(arith.factorize(12, t)) == 4
    assert arith.squarefull_part(arith.factorize(30, t)) == 1
    assert arith.is_squarefree(arith.factorize(30, t))
    assert not arith.is_squarefree(arith.factorize(18, t))


def test_digit_sum():
    assert arith.digit_sum(42523, 10) == 16
    assert arith.digit_sum(0, 10) == 0
    assert arith.digit_sum(255, 16) == 30
    assert arith.digit_sum(7, 2) == 3
    values = np.arange(0, 5000)
    for g in (2, 3, 10, 16):
        assert arith.digit_sums(values, g).tolist() == [digit_sum_str(n, g) for n in range(5000)]
    with pytest.raises(UsageError):
        arith.digit_sum(10, 1)
    with pytest.raises(UsageError):
        arith.digit_sum(-1, 10)
    with pytest.raises(UsageError):
        arith.digit_sums(values, 0)


def test_is_prime():
    for n in range(-5, 20000):
        assert arith.is_prime(n) == isprime(n)
    assert arith.is_prime(2**61 - 1)
    # strong pseudoprime to bases 2, 3, 5 and 7
    assert not arith.is_prime(3215031751)
    assert not arith.is_prime(3825123056546413051)
    with pytest.raises(UsageError):
        arith.is_prime(arith.MR_LIMIT + 2)


def test_next_prime():
    assert arith.next_prime(0) == 2
    assert arith.next_prime(2) == 3
    assert arith.next_prime(113) == 127


def test_primes_in():
    assert arith.primes_in(0, 30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert arith.primes_in(14, 17).tolist() == []
    assert arith.primes_in(5, 5).tolist() == []
    rng = random.Random(7)
    for _ in range(20):
        lo = rng.randrange(0, 10**6)
        hi = lo + rng.randrange(0, 5000)
        assert arith.primes_in(lo, hi).tolist() == list(primerange(lo, hi))
    with pytest.raises(UsageError):
        arith.primes_in(10, 5)


def test_prime_blocks_join():
    blocks = list(arith.iter_prime_blocks(2, 10000, block_size=333))
    assert np.concatenate(blocks).tolist() == list(primerange(2, 10000))


def test_prime_pi():
    assert arith.prime_pi(1) == 0
    assert arith.prime_pi(2) == 1
    assert arith.prime_pi(100) == 25
    assert arith.prime_pi(10**6) == 78498
