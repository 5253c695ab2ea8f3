# arith.py
#
# Prime generation, factorization and the arithmetic functions evaluated at
# shifted primes: Euler phi, sum of divisors sigma, omega (distinct prime
# factors), varrho (prime factors counted with multiplicity), tau (number of
# divisors), and base-g digit sums.
#
# Two factorization paths exist:
#
#   * FactorTable: an in-memory smallest-prime-factor table, O(log n)
#     factorization for n up to the table limit.
#   * segment_values: a segmented factor sieve producing all five functions for
#     every n in a window [lo, hi), used by the run scans that go far past any
#     table.
#
# n = 1 is the empty factorization (phi = sigma = tau = 1, omega = varrho = 0).

import dataclasses
import functools
import logging
import math
from typing import Iterator, NamedTuple, Tuple

import gmpy2
import numpy as np

from .config import DEFAULT_LIMITS, Limits
from .errors import ConfigurationError, UsageError

logger = logging.getLogger("primeruns.arith")

# Strong-probable-prime bases; together they are deterministic below MR_LIMIT.
MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MR_LIMIT = 3317044064679887385961981

# sigma(n) < n * (1 + log n) stays below 2^63 for every n up to here.
INT64_EXACT_LIMIT = 10**15

BLOCK_SIZE = 1 << 22


@dataclasses.dataclass(frozen=True, eq=False)
class FactorTable:
    limit: int
    spf: np.ndarray

    def smallest(self, n: int) -> int:
        return int(self.spf[n])

    def is_prime(self, n: int) -> bool:
        return 2 <= n <= self.limit and int(self.spf[n]) == n

    @functools.cached_property
    def primes(self) -> np.ndarray:
        idx = np.arange(self.spf.size, dtype=np.int64)
        return idx[(self.spf == idx) & (idx >= 2)]


class Factorization(NamedTuple):
    pairs: Tuple[Tuple[int, int], ...]

    @property
    def n(self) -> int:
        return math.prod(p**e for p, e in self.pairs)

    @property
    def omega(self) -> int:
        return len(self.pairs)

    @property
    def varrho(self) -> int:
        return sum(e for _, e in self.pairs)


class ArithValues(NamedTuple):
    phi: int
    sigma: int
    omega: int
    varrho: int
    tau: int


def build_factor_table(limit: int, limits: Limits = DEFAULT_LIMITS) -> FactorTable:
    if limit < 2:
        raise ConfigurationError("factor table limit must be at least 2, got {}".format(limit))
    if limit > limits.max_table_limit:
        raise ConfigurationError("factor table limit {} exceeds the memory budget {}".format(
            limit, limits.max_table_limit))
    spf = np.zeros(limit + 1, dtype=np.uint32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            # Basic slice: a view, so the masked store writes through.
            multiples = spf[p * p::p]
            multiples[multiples == 0] = p
    unset = np.flatnonzero(spf == 0)
    spf[unset] = unset
    spf[:2] = 0
    spf.flags.writeable = False
    logger.debug("built factor table up to %d", limit)
    return FactorTable(limit, spf)


def factorize(n: int, t: FactorTable) -> Factorization:
    if not 1 <= n <= t.limit:
        raise UsageError("{} is outside the factor table range [1, {}]".format(n, t.limit))
    pairs = []
    while n > 1:
        p = int(t.spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        pairs.append((p, e))
    return Factorization(tuple(pairs))


# Factor n past the table: trial division by the table's primes, then the
# cofactor has to be prime.
def factorize_any(n: int, t: FactorTable) -> Factorization:
    if n <= t.limit:
        return factorize(n, t)
    pairs = []
    m = n
    exhausted = True
    for p in t.primes.tolist():
        if p * p > m:
            exhausted = False
            break
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            pairs.append((p, e))
    if m > 1:
        if exhausted and not is_prime(m):
            raise UsageError("{} has a composite cofactor {} beyond sieve reach".format(n, m))
        pairs.append((m, 1))
    return Factorization(tuple(pairs))


def arith_values(f: Factorization) -> ArithValues:
    phi = sigma = tau = 1
    for p, e in f.pairs:
        phi *= p**(e - 1) * (p - 1)
        sigma *= (p**(e + 1) - 1) // (p - 1)
        tau *= e + 1
    return ArithValues(phi, sigma, f.omega, f.varrho, tau)


def squarefull_part(f: Factorization) -> int:
    return math.prod(p**e for p, e in f.pairs if e >= 2)


def is_squarefree(f: Factorization) -> bool:
    return all(e == 1 for _, e in f.pairs)


def digit_sum(n: int, g: int) -> int:
    if g < 2:
        raise UsageError("digit base must be at least 2, got {}".format(g))
    if n < 0:
        raise UsageError("digit sums are defined for n >= 0, got {}".format(n))
    s = 0
    while n:
        n, r = divmod(n, g)
        s += r
    return s


def digit_sums(values: np.ndarray, g: int) -> np.ndarray:
    if g < 2:
        raise UsageError("digit base must be at least 2, got {}".format(g))
    n = np.array(values, dtype=np.int64)
    s = np.zeros_like(n)
    while n.any():
        s += n % g
        n //= g
    return s


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in MR_BASES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n >= MR_LIMIT:
        raise UsageError("{} is beyond the deterministic primality range".format(n))
    return all(gmpy2.is_strong_prp(n, a) for a in MR_BASES)


def next_prime(n: int) -> int:
    m = max(n + 1, 2)
    while not is_prime(m):
        m += 1
    return m


def _base_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p::p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def _sieve_block(start: int, stop: int, base: np.ndarray) -> np.ndarray:
    mask = np.ones(stop - start, dtype=bool)
    for p in base.tolist():
        if p * p >= stop:
            break
        first = max(p * p, -(-start // p) * p)
        mask[first - start::p] = False
    if start < 2:
        mask[:2 - start] = False
    return np.flatnonzero(mask).astype(np.int64) + start


def iter_prime_blocks(lo: int, hi: int, block_size: int = BLOCK_SIZE) -> Iterator[np.ndarray]:
    if lo > hi:
        raise UsageError("empty prime range: lo={} > hi={}".format(lo, hi))
    lo = max(lo, 2)
    if hi <= lo:
        return
    base = _base_primes(math.isqrt(hi - 1))
    start = lo
    while start < hi:
        stop = min(start + block_size, hi)
        yield _sieve_block(start, stop, base)
        start = stop


def primes_in(lo: int, hi: int) -> np.ndarray:
    blocks = list(iter_prime_blocks(lo, hi))
    if not blocks:
        return np.array([], dtype=np.int64)
    return np.concatenate(blocks)


def prime_pi(x: int) -> int:
    if x < 2:
        return 0
    return sum(int(b.size) for b in iter_prime_blocks(2, x + 1))


class SegmentValues(NamedTuple):
    lo: int
    phi: np.ndarray
    sigma: np.ndarray
    omega: np.ndarray
    varrho: np.ndarray
    tau: np.ndarray

    def row(self, n: int) -> ArithValues:
        i = n - self.lo
        return ArithValues(int(self.phi[i]), int(self.sigma[i]), int(self.omega[i]),
                           int(self.varrho[i]), int(self.tau[i]))


def segment_values(lo: int, hi: int) -> SegmentValues:
    if lo < 1 or hi < lo:
        raise UsageError("bad segment [{}, {})".format(lo, hi))
    if hi > INT64_EXACT_LIMIT:
        raise UsageError("segment end {} is beyond exact int64 reach".format(hi))
    size = hi - lo
    rem = np.arange(lo, hi, dtype=np.int64)
    phi = np.ones(size, dtype=np.int64)
    sigma = np.ones(size, dtype=np.int64)
    omega = np.zeros(size, dtype=np.int64)
    varrho = np.zeros(size, dtype=np.int64)
    tau = np.ones(size, dtype=np.int64)
    for p in _base_primes(math.isqrt(max(hi - 1, 1))).tolist():
        first = -(-lo // p) * p
        if first >= hi:
            continue
        idx = np.arange(first - lo, size, p)
        r = rem[idx] // p
        e = np.ones(idx.size, dtype=np.int64)
        pe = np.full(idx.size, p, dtype=np.int64)
        more = r % p == 0
        while more.any():
            r[more] //= p
            e[more] += 1
            pe[more] *= p
            more = r % p == 0
        rem[idx] = r
        phi[idx] *= (pe // p) * (p - 1)
        # (p^(e+1) - 1)/(p - 1) without forming p^(e+1)
        sigma[idx] *= pe + (pe - 1) // (p - 1)
        omega[idx] += 1
        varrho[idx] += e
        tau[idx] *= e + 1
    big = rem > 1
    cof = rem[big]
    phi[big] *= cof - 1
    sigma[big] *= cof + 1
    omega[big] += 1
    varrho[big] += 1
    tau[big] *= 2
    return SegmentValues(lo, phi, sigma, omega, varrho, tau)
