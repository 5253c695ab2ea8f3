# sieve.py
#
# Multidimensional sieve weights on n in Omega = {N <= n < 2N : n = nu mod W}.
#
# With R = floor(N^theta) the weights are
#
#   lambda_d = prod(mu(d_i) d_i) * sum over r with d_i | r_i of
#              mu(prod r_i)^2 / prod(phi(r_i)) * F(log r_1 / log R, ...)
#
# where r runs over tuples coprime to W, and lambda_d = 0 unless prod d_i is
# squarefree, at most R and coprime to W * p_bad. The weight of n is
#
#   w(n) = (sum of lambda_d over d with d_i | n + h_i)^2
#
# and S1 = sum w(n), S2 = sum w(n) * #{i : n + h_i prime}. All of these are
# exact rationals. The only inexact ingredient is log r / log R, computed once
# at 80 bits and converted exactly to a rational, so every identity checked on
# the tables (the rearrangement of S1, the y change of variables) is exact.

import dataclasses
import functools
import itertools
import logging
import math
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import gmpy2
import mpmath
import numpy as np
from sympy import totient
from sympy.ntheory.modular import solve_congruence
from tqdm import tqdm

from . import arith, simplex, tuples
from .config import DEFAULT_LIMITS, Limits, limits_from, parse_basis_coefficients, \
    parse_int, parse_int_list
from .errors import ConfigurationError, DegenerateConfigurationError, ResourceError, \
    UsageError
from .pool import WorkerMap
from .simplex import SimplexPolynomial
from .tuples import AdmissibleTuple, ResidueSelection

logger = logging.getLogger("primeruns.sieve")

LOG_PRECISION = 80
BLOCK_MEMBERS = 4096

DivisorTuple = Tuple[int, ...]


@dataclasses.dataclass(frozen=True)
class SieveConfig:
    N: int
    theta: Fraction
    H: AdmissibleTuple
    selection: ResidueSelection
    F: SimplexPolynomial
    p_bad: int = 1

    def __post_init__(self):
        if self.N < 2:
            raise UsageError("N must be at least 2, got {}".format(self.N))
        if not 0 < self.theta < Fraction(1, 4):
            raise UsageError("theta must lie in (0, 1/4), got {}".format(self.theta))
        if self.F.k != self.H.k:
            raise UsageError("F has {} variables but the tuple has {} entries".format(
                self.F.k, self.H.k))
        if self.p_bad < 1 or math.gcd(self.p_bad, self.W) != 1:
            raise UsageError("p_bad must be a positive integer coprime to W, got {}".format(
                self.p_bad))
        if self.N + min(self.H) - 1 < 1:
            raise UsageError("n + h_i - 1 must stay positive; raise N above {}".format(
                -min(self.H)))
        if self.first_member >= 2 * self.N:
            raise UsageError("Omega is empty: no n in [{}, {}) is {} mod {}".format(
                self.N, 2 * self.N, self.nu, self.W))

    @property
    def k(self) -> int:
        return self.H.k

    @property
    def W(self) -> int:
        return self.selection.W

    @property
    def nu(self) -> int:
        return self.selection.nu

    @functools.cached_property
    def R(self) -> int:
        root, _ = gmpy2.iroot(gmpy2.mpz(self.N) ** self.theta.numerator, self.theta.denominator)
        return int(root)

    @property
    def first_member(self) -> int:
        return self.N + (self.nu - self.N) % self.W

    def members(self) -> range:
        return range(self.first_member, 2 * self.N, self.W)

    def in_omega(self, n: int) -> bool:
        return self.N <= n < 2 * self.N and n % self.W == self.nu

    @property
    def table_limit(self) -> int:
        return 2 * self.N + max(self.H)

    def log_R(self) -> gmpy2.mpfr:
        return gmpy2.mpfr(self.theta.numerator) / self.theta.denominator * gmpy2.log(self.N)


def sieve_config(values: Dict[str, str], limits: Limits = DEFAULT_LIMITS) -> SieveConfig:
    """SieveConfig from config-file style key/value strings."""
    N = parse_int(values, "N", 10**4)
    k = parse_int(values, "k", 1)
    theta = Fraction(parse_int(values, "theta_num", 1), parse_int(values, "theta_den", 5))
    H = tuples.parse_tuple(values.get("tuple", "factorial"), k, parse_int(values, "sign", 1))
    if H.k != k:
        raise ConfigurationError("tuple has {} entries but k = {}".format(H.k, k))
    if any(key in values for key in ("z1", "z2", "z3")):
        selection = tuples.assemble_selection(tuples.plan_from_values(values, N, k), H)
    else:
        selection = tuples.basic_selection(H, parse_int_list(values.get("W_primes", "2, 3")))
    F = simplex.combination(k, parse_basis_coefficients(values.get("F", "1,0=1")))
    cfg = SieveConfig(N, theta, H, selection, F, parse_int(values, "p_bad", 1))
    check_limits(cfg, limits_from(values, limits))
    return cfg


def check_limits(cfg: SieveConfig, limits: Limits = DEFAULT_LIMITS):
    if cfg.k > limits.max_k:
        raise ResourceError("k = {} is above the cap {}".format(cfg.k, limits.max_k))
    if cfg.R > limits.max_R:
        raise ResourceError("R = {} is above the cap {}".format(cfg.R, limits.max_R))
    if cfg.table_limit > limits.max_table_limit:
        raise ResourceError("2N + max h = {} is above the table cap {}".format(
            cfg.table_limit, limits.max_table_limit))


def _squarefree_divisors(primes: Sequence[int], bound: int) -> List[int]:
    divs = [1]
    for p in primes:
        divs += [d * p for d in divs if d * p <= bound]
    return sorted(divs)


def _coprime_tuples(candidates: Sequence[int], k: int, bound: int) -> Iterable[DivisorTuple]:
    """Pairwise coprime k-tuples from candidates (ascending) with product <= bound."""
    if k == 0:
        yield ()
        return
    for r in candidates:
        if r > bound:
            break
        for rest in _coprime_tuples(candidates, k - 1, bound // r):
            if math.gcd(r, math.prod(rest)) == 1:
                yield (r,) + rest


@dataclasses.dataclass(frozen=True, eq=False)
class LambdaTable:
    k: int
    R: int
    # primes <= R coprime to W * p_bad; the only primes that can divide a support entry
    primes: Tuple[int, ...]
    values: Dict[DivisorTuple, Fraction]
    # F at the log ratios of every r tuple in the inner sum
    y_values: Dict[DivisorTuple, Fraction]
    log_ratios: Dict[int, Fraction]

    def get(self, d: DivisorTuple) -> Fraction:
        return self.values.get(d, Fraction(0))

    def support(self) -> List[Tuple[DivisorTuple, Fraction]]:
        return sorted((d, v) for d, v in self.values.items() if v)


def _squarefree_info(R: int, modulus: int) -> Dict[int, Tuple[int, ...]]:
    """r -> prime factors, for squarefree r <= R coprime to modulus."""
    t = arith.build_factor_table(max(R, 2))
    out = {1: ()}
    for r in range(2, R + 1):
        f = arith.factorize(r, t)
        if arith.is_squarefree(f) and math.gcd(r, modulus) == 1:
            out[r] = tuple(p for p, _ in f.pairs)
    return out


def _mu_times(d: int, primes: Tuple[int, ...]) -> int:
    return (-1) ** len(primes) * d


def _phi(primes: Tuple[int, ...]) -> int:
    return math.prod(p - 1 for p in primes)


def lambda_table(cfg: SieveConfig, limits: Limits = DEFAULT_LIMITS) -> LambdaTable:
    check_limits(cfg, limits)
    R = cfg.R
    info = _squarefree_info(R, cfg.W)
    with gmpy2.local_context(gmpy2.context(), precision=LOG_PRECISION):
        log_R = cfg.log_R()
        log_ratios = {}
        for r in info:
            num, den = (gmpy2.log(r) / log_R).as_integer_ratio()
            log_ratios[r] = Fraction(int(num), int(den))

    sums: Dict[DivisorTuple, Fraction] = {}
    y_values: Dict[DivisorTuple, Fraction] = {}
    divisors = {r: _squarefree_divisors(ps, r) for r, ps in info.items()}
    for r in _coprime_tuples(sorted(info), cfg.k, R):
        y = cfg.F.evaluate([log_ratios[ri] for ri in r])
        if not y:
            continue
        y_values[r] = y
        g = y / math.prod(_phi(info[ri]) for ri in r)
        for d in itertools.product(*(divisors[ri] for ri in r)):
            sums[d] = sums.get(d, Fraction(0)) + g

    values = {}
    for d, s in sums.items():
        if math.gcd(math.prod(d), cfg.p_bad) > 1:
            continue
        v = s * math.prod(_mu_times(di, info[di]) for di in d)
        if v:
            values[d] = v
    primes = tuple(p for p in arith.primes_in(2, R + 1).tolist()
                   if math.gcd(p, cfg.W * cfg.p_bad) == 1)
    logger.info("lambda table: R=%d, %d nonzero entries", R, len(values))
    return LambdaTable(cfg.k, R, primes, values, y_values, log_ratios)


def support_violations(cfg: SieveConfig, lt: LambdaTable) -> List[DivisorTuple]:
    """Nonzero entries that are not squarefree, above R, or share a factor with W * p_bad."""
    bad = []
    for d, _ in lt.support():
        prod = math.prod(d)
        f = arith.factorize_any(prod, arith.build_factor_table(max(2, math.isqrt(prod) + 1)))
        if prod > cfg.R or not arith.is_squarefree(f) or math.gcd(prod, cfg.W * cfg.p_bad) > 1:
            bad.append(d)
    return bad


def _divisor_sum(n: int, H: AdmissibleTuple, lt: LambdaTable) -> Fraction:
    per = []
    for h in H:
        m = n + h
        per.append(_squarefree_divisors([p for p in lt.primes if m % p == 0], lt.R))
    return sum((lt.get(d) for d in itertools.product(*per) if math.prod(d) <= lt.R),
               Fraction(0))


def weight_w(n: int, cfg: SieveConfig, lt: LambdaTable) -> Fraction:
    if not cfg.in_omega(n):
        raise UsageError("{} is not in Omega (N={}, nu={} mod {})".format(n, cfg.N, cfg.nu, cfg.W))
    return _divisor_sum(n, cfg.H, lt) ** 2


def _weights_block(cfg: SieveConfig, lt: LambdaTable, block: range) -> List[Tuple[Fraction, int]]:
    out = []
    for n in block:
        w = _divisor_sum(n, cfg.H, lt) ** 2
        out.append((w, sum(arith.is_prime(n + h) for h in cfg.H)))
    return out


@dataclasses.dataclass(frozen=True, eq=False)
class WeightedSpace:
    cfg: SieveConfig
    members: Tuple[int, ...]
    weights: Tuple[Fraction, ...]
    prime_counts: Tuple[int, ...]

    @functools.cached_property
    def total(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    @functools.cached_property
    def table(self) -> arith.FactorTable:
        return arith.build_factor_table(self.cfg.table_limit)

    def unweighted(self) -> "WeightedSpace":
        return WeightedSpace(self.cfg, self.members, (Fraction(1),) * len(self.members),
                             self.prime_counts)

    def shifted_values(self, i: int, n: int) -> arith.ArithValues:
        """phi, sigma, ... of n + h_i - 1 (i is 1-based)."""
        return arith.arith_values(arith.factorize(n + self.cfg.H.order[i - 1] - 1, self.table))

    def expectation(self, value: Callable[[int], Fraction]) -> Fraction:
        if not self.total:
            raise DegenerateConfigurationError("S1 = 0: the weights vanish on Omega")
        return sum((w * value(n) for n, w in zip(self.members, self.weights) if w),
                   Fraction(0)) / self.total

    def probability(self, event: Callable[[int], bool]) -> Fraction:
        return self.expectation(lambda n: 1 if event(n) else 0)


def weighted_space(cfg: SieveConfig, lt: LambdaTable, threads: int = 1,
                   progress: bool = False) -> WeightedSpace:
    members = cfg.members()
    blocks = [members[i:i + BLOCK_MEMBERS] for i in range(0, len(members), BLOCK_MEMBERS)]
    weights, counts = [], []
    bar = tqdm(total=len(members), desc="weights", unit="n", disable=not progress)
    with WorkerMap(threads) as mapper:
        for rows in mapper(_weights_block, itertools.repeat(cfg), itertools.repeat(lt), blocks):
            for w, c in rows:
                weights.append(w)
                counts.append(c)
            bar.update(len(rows))
    bar.close()
    return WeightedSpace(cfg, tuple(members), tuple(weights), tuple(counts))


@dataclasses.dataclass(frozen=True)
class SieveSums:
    k: int
    S1: Fraction
    S2: Fraction
    # weight mass of the members with exactly c primes among n + h_i, c = 0..k
    distribution: Tuple[Fraction, ...]

    @property
    def EX(self) -> Fraction:
        return self.S2 / self.S1

    def prob_at_least(self, K: int) -> Fraction:
        return sum(self.distribution[max(K, 0):], Fraction(0)) / self.S1

    def lower_bound_holds(self, K: int) -> bool:
        """Prob(X >= K) >= (EX - (K - 1)) / k, vacuous when EX <= K - 1."""
        if self.EX <= K - 1:
            return True
        return self.prob_at_least(K) >= (self.EX - (K - 1)) / self.k


def compute_S1_S2(space: WeightedSpace) -> SieveSums:
    k = space.cfg.k
    S1 = space.total
    if not S1:
        raise DegenerateConfigurationError("S1 = 0: the weights vanish on Omega")
    dist = [Fraction(0)] * (k + 1)
    S2 = Fraction(0)
    for w, c in zip(space.weights, space.prime_counts):
        dist[c] += w
        S2 += c * w
    return SieveSums(k, S1, S2, tuple(dist))


def _functionals(F: SimplexPolynomial) -> Tuple[Fraction, List[Fraction]]:
    I = simplex.I_functional(F)
    Js = [simplex.J_functional(F, m) for m in range(1, F.k + 1)]
    if not I or not all(Js):
        raise UsageError("I(F) and every J_m(F) must be nonzero for the main terms")
    return I, Js


def predicted_S1_S2(cfg: SieveConfig) -> dict:
    I, Js = _functionals(cfg.F)
    k, W = cfg.k, cfg.W
    ratio_limit = cfg.theta * sum(Js) / I
    with mpmath.workdps(30):
        logN = mpmath.log(cfg.N)
        logR = cfg.theta.numerator * logN / cfg.theta.denominator
        density = mpmath.mpf(int(totient(W))) ** k / mpmath.mpf(W) ** (k + 1)
        S1 = density * cfg.N * logR ** k * mpmath.mpf(I.numerator) / I.denominator
        J = sum(Js, Fraction(0))
        S2 = density * cfg.N / logN * logR ** (k + 1) * mpmath.mpf(J.numerator) / J.denominator
        return {"I": I, "J": Js, "S1": float(S1), "S2": float(S2), "ratio_limit": ratio_limit}


def _pair_terms(cfg: SieveConfig, lt: LambdaTable, limits: Limits):
    """(d, e, lcms, count of n in Omega with [d_i, e_i] | n + h_i) over support pairs."""
    support = lt.support()
    if len(support) ** 2 > limits.max_pairs:
        raise ResourceError("{} support pairs exceed the cap {}".format(
            len(support) ** 2, limits.max_pairs))
    for (d, ld), (e, le) in itertools.product(support, repeat=2):
        lcms = tuple(math.lcm(a, b) for a, b in zip(d, e))
        system = [(cfg.nu, cfg.W)] + [(-h, m) for h, m in zip(cfg.H, lcms)]
        solved = solve_congruence(*system)
        if solved is None:
            count = 0
        else:
            x, M = int(solved[0]), int(solved[1])
            count = (2 * cfg.N - 1 - x) // M - (cfg.N - 1 - x) // M
        yield d, ld, e, le, lcms, count


def _pairwise_coprime(moduli: Sequence[int]) -> bool:
    return all(math.gcd(a, b) == 1 for a, b in itertools.combinations(moduli, 2))


def rearranged_S1(cfg: SieveConfig, lt: LambdaTable, limits: Limits = DEFAULT_LIMITS) -> Fraction:
    """sum over (d, e) of lambda_d lambda_e #{n in Omega : [d_i, e_i] | n + h_i for all i}"""
    return sum((ld * le * count for _, ld, _, le, _, count in _pair_terms(cfg, lt, limits)),
               Fraction(0))


def coprimality_violations(cfg: SieveConfig, lt: LambdaTable,
                           limits: Limits = DEFAULT_LIMITS) -> List[Tuple[DivisorTuple, DivisorTuple]]:
    """Pairs with W, [d_1, e_1], ... not pairwise coprime whose counting set is nonempty."""
    return [(d, e) for d, _, e, _, lcms, count in _pair_terms(cfg, lt, limits)
            if count and not _pairwise_coprime((cfg.W,) + lcms)]


def tilde_S1(cfg: SieveConfig, lt: LambdaTable, q: int = 1) -> Fraction:
    if q < 1:
        raise UsageError("q must be positive, got {}".format(q))
    total = Fraction(0)
    for (d, ld), (e, le) in itertools.product(lt.support(), repeat=2):
        lcms = tuple(math.lcm(a, b) for a, b in zip(d, e))
        moduli = (cfg.W,) + lcms + ((q,) if q > 1 else ())
        if _pairwise_coprime(moduli):
            total += ld * le / math.prod(lcms)
    return Fraction(cfg.N, cfg.W) * total


def coprime_restriction_report(cfg: SieveConfig, lt: LambdaTable, q: int) -> dict:
    if q < 2:
        raise UsageError("q must be at least 2, got {}".format(q))
    full = tilde_S1(cfg, lt)
    restricted = tilde_S1(cfg, lt, q)
    difference = full - restricted
    p_min = min(p for p, _ in arith.factorize_any(q, arith.build_factor_table(
        max(2, math.isqrt(q) + 1))).pairs)
    with mpmath.workdps(30):
        normalizer = (mpmath.mpf(int(totient(cfg.W))) ** cfg.k / mpmath.mpf(cfg.W) ** (cfg.k + 1)
                      * cfg.N * mpmath.log(cfg.N) ** cfg.k / p_min)
        ratio = float(mpmath.mpf(difference.numerator) / difference.denominator / normalizer)
    return {"q": q, "tilde_S1": full, "restricted": restricted, "difference": difference,
            "normalizer": float(normalizer), "ratio": ratio}


@functools.lru_cache(maxsize=None)
def _prime_factors(n: int) -> Tuple[int, ...]:
    f = arith.factorize_any(n, arith.build_factor_table(max(2, math.isqrt(n) + 1)))
    return tuple(p for p, _ in f.pairs)


def y_transform(lt: LambdaTable) -> Dict[DivisorTuple, Fraction]:
    """y_r = prod(mu(r_i) phi(r_i)) * sum over d with r_i | d_i of lambda_d / prod d_i"""
    sums: Dict[DivisorTuple, Fraction] = {}
    for d, v in lt.support():
        term = v / math.prod(d)
        for r in itertools.product(*(_squarefree_divisors(_prime_factors(di), di) for di in d)):
            sums[r] = sums.get(r, Fraction(0)) + term
    out = {}
    for r, s in sums.items():
        y = s * math.prod((-1) ** len(_prime_factors(ri)) * _phi(_prime_factors(ri)) for ri in r)
        if y:
            out[r] = y
    return out


def lambda_from_y(y: Dict[DivisorTuple, Fraction]) -> Dict[DivisorTuple, Fraction]:
    """lambda_d = prod(mu(d_i) d_i) * sum over r with d_i | r_i of y_r / prod phi(r_i)"""
    sums: Dict[DivisorTuple, Fraction] = {}
    for r, v in sorted(y.items()):
        term = v / math.prod(_phi(_prime_factors(ri)) for ri in r)
        for d in itertools.product(*(_squarefree_divisors(_prime_factors(ri), ri) for ri in r)):
            sums[d] = sums.get(d, Fraction(0)) + term
    out = {}
    for d, s in sums.items():
        v = s * math.prod(_mu_times(di, _prime_factors(di)) for di in d)
        if v:
            out[d] = v
    return out


def error_E(N: int, q: int, primes: Optional[np.ndarray] = None) -> Fraction:
    """1 + max over a coprime to q of |#{p in [N, 2N) : p = a mod q} - X / phi(q)|"""
    if q < 1:
        raise UsageError("q must be positive, got {}".format(q))
    if primes is None:
        primes = arith.primes_in(N, 2 * N)
    counts = np.bincount(primes % q, minlength=q)
    expected = Fraction(int(primes.size), int(totient(q)))
    return 1 + max(abs(int(counts[a]) - expected) for a in range(q) if math.gcd(a, q) == 1)


def bv_scan(N: int, P: int, d_max: int, p_bad: int = 1) -> Tuple[Fraction, Dict[int, Fraction]]:
    if math.gcd(P, p_bad) != 1:
        raise UsageError("P and p_bad must be coprime, got {} and {}".format(P, p_bad))
    primes = arith.primes_in(N, 2 * N)
    terms = {d: error_E(N, d * P, primes) for d in range(1, d_max + 1)
             if math.gcd(d, P * p_bad) == 1}
    return sum(terms.values(), Fraction(0)), terms


def log_ratio_expectation(space: WeightedSpace, i: int, window: Tuple[int, int]) -> mpmath.mpf:
    """E[sum of log(p / (p - 1)) over primes p | n + h_i - 1 with lo < p <= hi]"""
    lo, hi = window
    if not space.total:
        raise DegenerateConfigurationError("S1 = 0: the weights vanish on Omega")
    h = space.cfg.H.order[i - 1]
    with mpmath.workdps(tuples.LOG_DPS):
        total = mpmath.mpf(0)
        for n, w in zip(space.members, space.weights):
            if not w or lo >= hi:
                continue
            f = arith.factorize(n + h - 1, space.table)
            s = mpmath.fsum(mpmath.log(mpmath.mpf(p) / (p - 1)) for p, _ in f.pairs if lo < p <= hi)
            total += mpmath.mpf(w.numerator) / w.denominator * s
        return total / (mpmath.mpf(space.total.numerator) / space.total.denominator)


def default_omega_interval(N: int) -> Tuple[float, float]:
    """(log N / (log log N)^2, N^(1 / log log N)]"""
    ll = tuples.iterated_log(N, 2)
    if ll <= 0:
        return (0.0, 0.0)
    return (math.log(N) / ll ** 2, N ** (1 / ll))


def omega_tilde_expectation(space: WeightedSpace, i: int,
                            interval: Optional[Tuple[float, float]] = None) -> Fraction:
    lo, hi = interval if interval is not None else default_omega_interval(space.cfg.N)
    if lo >= hi:
        return Fraction(0)
    h = space.cfg.H.order[i - 1]
    return space.expectation(lambda n: sum(
        1 for p, _ in arith.factorize(n + h - 1, space.table).pairs if lo < p <= hi))


def second_moment_ratio(space: WeightedSpace) -> dict:
    """sum of w(n)^2 against (N / W) (log R)^(19k)"""
    total = sum((w * w for w in space.weights), Fraction(0))
    cfg = space.cfg
    with mpmath.workdps(30):
        logR = cfg.theta.numerator * mpmath.log(cfg.N) / cfg.theta.denominator
        scale = mpmath.mpf(cfg.N) / cfg.W * logR ** (19 * cfg.k)
        ratio = float(mpmath.mpf(total.numerator) / total.denominator / scale)
    return {"sum_w2": total, "ratio": ratio}


def default_B(N: int) -> int:
    """floor(log log N * log log log log N / 4)"""
    return math.floor(tuples.iterated_log(N, 2) * tuples.iterated_log(N, 4) / 4)


def exceptional_scan(cfg: SieveConfig, i: int, B: int, threshold: Optional[int] = None,
                     A: int = 1, table: Optional[arith.FactorTable] = None) -> dict:
    """Members of Omega whose n + h_i - 1 has many repeated prime factors.

    Counts varrho - omega >= threshold (default B) and, separately, a squarefull
    part of at least 2^(2B) once the primes of W are removed.
    """
    if B < 1:
        raise UsageError("B must be at least 1 (the default floor is {} at N={})".format(
            default_B(cfg.N), cfg.N))
    threshold = B if threshold is None else threshold
    t = table if table is not None else arith.build_factor_table(cfg.table_limit)
    h = cfg.H.order[i - 1]
    W_primes = set(cfg.selection.primes)
    excess = squarefull = 0
    members = cfg.members()
    for n in members:
        f = arith.factorize(n + h - 1, t)
        if f.varrho - f.omega >= threshold:
            excess += 1
        rest = arith.Factorization(tuple((p, e) for p, e in f.pairs if p not in W_primes))
        if arith.squarefull_part(rest) >= 4 ** B:
            squarefull += 1
    target = float(mpmath.mpf(cfg.N) / (cfg.W * mpmath.log(cfg.N) ** A))
    return {"members": len(members), "B": B, "threshold": threshold,
            "excess_count": excess, "squarefull_count": squarefull, "A": A, "target": target}


def default_ratio_windows(k: int) -> List[Tuple[int, int]]:
    return [(4 * i, 4 * i + 3) for i in range(1, k + 1)]


def ratio_condition_probability(space: WeightedSpace, ratio: str,
                                windows: Optional[Sequence[Tuple[int, int]]] = None) -> Fraction:
    """Prob that each (n+h_i-1)/phi(n+h_i-1) (or sigma(m)/m) lies in (2^a_i, 2^b_i]."""
    if ratio not in ("phi", "sigma"):
        raise UsageError("ratio must be phi or sigma, got {!r}".format(ratio))
    k = space.cfg.k
    windows = default_ratio_windows(k) if windows is None else list(windows)
    if len(windows) != k:
        raise UsageError("expected {} windows, got {}".format(k, len(windows)))

    def event(n):
        for i, (a, b) in enumerate(windows, 1):
            m = n + space.cfg.H.order[i - 1] - 1
            v = space.shifted_values(i, n)
            r = Fraction(m, v.phi) if ratio == "phi" else Fraction(v.sigma, m)
            if not Fraction(2) ** a < r <= Fraction(2) ** b:
                return False
        return True
    return space.probability(event)


def omega_condition_probability(space: WeightedSpace, centres: Sequence[int],
                                width: int) -> Fraction:
    """Prob that 0 < omega(n + h_i - 1) - centre_i < width for every i."""
    if len(centres) != space.cfg.k:
        raise UsageError("expected {} centres, got {}".format(space.cfg.k, len(centres)))
    return space.probability(lambda n: all(
        0 < space.shifted_values(i, n).omega - c < width for i, c in enumerate(centres, 1)))


def sieve_report(cfg: SieveConfig, lt: LambdaTable, space: WeightedSpace) -> dict:
    sums = compute_S1_S2(space)
    out = {
        "N": cfg.N, "k": cfg.k, "theta": str(cfg.theta), "R": cfg.R,
        "W": str(cfg.W), "nu": str(cfg.nu), "p_bad": cfg.p_bad,
        "tuple": list(cfg.H.order), "members": len(space.members),
        "S1": str(sums.S1), "S2": str(sums.S2), "EX": str(sums.EX),
        "EX_float": float(sums.EX),
        "prob_table": {K: str(sums.prob_at_least(K)) for K in range(1, cfg.k + 1)},
    }
    try:
        predicted = predicted_S1_S2(cfg)
    except UsageError as e:
        logger.warning("no main terms: %s", e)
        return out
    out["predicted"] = {"S1": predicted["S1"], "S2": predicted["S2"],
                        "ratio_limit": str(predicted["ratio_limit"])}
    out["ratios"] = {"S1": float(sums.S1) / predicted["S1"],
                     "S2": float(sums.S2) / predicted["S2"] if predicted["S2"] else None}
    return out
