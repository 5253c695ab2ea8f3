# digits.py
#
# Digit sums of primes: the local limit law for #{p <= x : s_g(p) = l} and the
# plans that pick primes p_1, ..., p_k with prescribed digit sums and a
# multiplier A = g^Npow above all of them. Since A n + p_i just writes the
# digits of p_i under those of n,
#
#   s_g(A n + p_i) = s_g(n) + s_g(p_i),
#
# so the order of the digit sums of the candidates A n + p_i is fixed by the
# plan whatever n is. Turning that into consecutive primes needs k >= e^(8K+5)
# primes in the plan, which is reported but never reachable here; plans built
# with fewer are marked as demonstrations.

import dataclasses
import itertools
import json
import logging
import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

import mpmath
import numpy as np
from sympy import totient

from . import arith
from .errors import InfeasibleError, InternalConsistencyError, NotApplicableError, UsageError
from .pool import WorkerMap

logger = logging.getLogger("primeruns.digits")

MODES = ("constant", "increasing", "decreasing")
BLOCK_SIZE = 1 << 20
# e^(8K+5) is written out in full up to this exponent.
MAX_EXPANDED_EXPONENT = 2000


@dataclasses.dataclass(frozen=True)
class DigitLawParams:
    g: int

    def __post_init__(self):
        if self.g < 2:
            raise UsageError("digit base must be at least 2, got {}".format(self.g))

    @property
    def mu(self) -> Fraction:
        return Fraction(self.g - 1, 2)

    @property
    def sigma2(self) -> Fraction:
        return Fraction(self.g * self.g - 1, 12)

    def digits(self, x) -> mpmath.mpf:
        """log x / log g"""
        return mpmath.log(x) / mpmath.log(self.g)

    def mean_sum(self, x) -> mpmath.mpf:
        return mpmath.mpf(self.mu.numerator) / self.mu.denominator * self.digits(x)

    def variance(self, x) -> mpmath.mpf:
        return mpmath.mpf(self.sigma2.numerator) / self.sigma2.denominator * self.digits(x)


def dmr_prediction(g: int, x: int, l: int, pi_x: Optional[int] = None) -> float:
    """Main term of #{p <= x : s_g(p) = l}, for gcd(l, g - 1) = 1."""
    params = DigitLawParams(g)
    if x < 100:
        raise UsageError("the local law needs x >= 100, got {}".format(x))
    if math.gcd(l, g - 1) != 1:
        raise NotApplicableError("gcd({}, {}) > 1: every prime but a few misses this sum".format(
            l, g - 1))
    if pi_x is None:
        pi_x = arith.prime_pi(x)
    with mpmath.workdps(30):
        var = params.variance(x)
        gauss = mpmath.exp(-(l - params.mean_sum(x)) ** 2 / (2 * var))
        main = mpmath.mpf(g - 1) / int(totient(g - 1)) * pi_x / mpmath.sqrt(2 * mpmath.pi * var)
        return float(main * gauss)


def _digit_sum_counts(g: int, lo: int, hi: int) -> np.ndarray:
    return np.bincount(arith.digit_sums(arith.primes_in(lo, hi), g))


def digit_histogram(g: int, x: int, threads: int = 1) -> Dict[int, Tuple[int, Optional[float], Optional[float]]]:
    """l -> (observed, predicted, observed / predicted) over primes p <= x."""
    los = list(range(2, x + 1, BLOCK_SIZE))
    his = los[1:] + [x + 1]
    observed = np.zeros(0, dtype=np.int64)
    with WorkerMap(threads) as mapper:
        for counts in mapper(_digit_sum_counts, itertools.repeat(g), los, his):
            if counts.size > observed.size:
                observed = np.pad(observed, (0, counts.size - observed.size))
            observed[:counts.size] += counts
    pi_x = int(observed.sum())
    table = {}
    for l in range(observed.size):
        try:
            predicted = dmr_prediction(g, x, l, pi_x)
        except NotApplicableError:
            predicted = None
        ratio = int(observed[l]) / predicted if predicted else None
        table[l] = (int(observed[l]), predicted, ratio)
    return table


def central_sums(g: int, x: int) -> List[int]:
    """l coprime to g - 1 within one standard deviation of the mean digit sum."""
    params = DigitLawParams(g)
    with mpmath.workdps(30):
        centre = params.mean_sum(x)
        spread = mpmath.sqrt(params.variance(x))
        lo, hi = int(mpmath.ceil(centre - spread)), int(mpmath.floor(centre + spread))
    return [l for l in range(max(lo, 0), hi + 1) if math.gcd(l, g - 1) == 1]


def primes_with_digit_sum(g: int, lo: int, hi: int, l: int, count: Optional[int] = None) -> List[int]:
    """Up to `count` primes p in [lo, hi) with s_g(p) = l, ascending."""
    if lo >= hi:
        raise UsageError("empty range [{}, {})".format(lo, hi))
    found: List[int] = []
    for block in arith.iter_prime_blocks(lo, hi):
        hits = block[arith.digit_sums(block, g) == l]
        found.extend(int(p) for p in hits)
        if count is not None and len(found) >= count:
            return found[:count]
    if not found:
        logger.info("no prime in [%d, %d) has base-%d digit sum %d", lo, hi, g, l)
    return found


def nearest_coprime(g: int, target) -> int:
    """Nearest integer to target coprime to g - 1; ties go to the smaller."""
    base = int(mpmath.floor(target))
    best = None
    for c in range(max(base - g, 0), base + g + 2):
        if math.gcd(c, g - 1) != 1:
            continue
        key = (abs(c - target), c)
        if best is None or key < best[0]:
            best = (key, c)
    return best[1]


def coprime_sums_above(g: int, target, k: int) -> List[int]:
    """The k smallest integers > target coprime to g - 1."""
    out = []
    l = int(mpmath.floor(target)) + 1
    while len(out) < k:
        if math.gcd(l, g - 1) == 1:
            out.append(l)
        l += 1
    return out


def k_required(K: int) -> str:
    """ceil(e^(8K+5)) in decimal, or e^(8K+5) once that gets unwieldy."""
    e = 8 * K + 5
    if e > MAX_EXPANDED_EXPONENT:
        return "e^{}".format(e)
    with mpmath.workdps(int(e / math.log(10)) + 20):
        return str(int(mpmath.ceil(mpmath.exp(e))))


@dataclasses.dataclass(frozen=True)
class DigitRunPlan:
    g: int
    K: int
    k_required: str
    k_used: int
    primes: Tuple[int, ...]
    target_sums: Tuple[int, ...]
    A: int
    mode: str
    guarantee: str

    def as_dict(self) -> dict:
        return {
            "g": self.g, "K": self.K, "k_required": self.k_required, "k_used": self.k_used,
            "mode": self.mode, "primes": list(self.primes), "sums": list(self.target_sums),
            "A": str(self.A), "guarantee": self.guarantee,
        }


def _multiplier(g: int, primes: Sequence[int]) -> int:
    A = g
    while A <= max(primes):
        A *= g
    return A


def _guarantee(K: int, k_used: int) -> str:
    req = k_required(K)
    if req.isdigit() and k_used >= int(req):
        return "unconditional_if_k_required"
    return "desk_scale_demo"


def _check_request(g: int, K: int, k_override: int):
    DigitLawParams(g)
    if K < 1:
        raise UsageError("K must be at least 1, got {}".format(K))
    if k_override < 2:
        raise UsageError("the plan needs at least 2 primes, got {}".format(k_override))


def constant_run_plan(g: int, K: int, k_override: int, search_x: int) -> DigitRunPlan:
    _check_request(g, K, k_override)
    with mpmath.workdps(30):
        l = nearest_coprime(g, DigitLawParams(g).mean_sum(search_x))
    floor = max(g, k_override) + 1
    if floor >= search_x:
        raise InfeasibleError("no room above {} below {}".format(floor - 1, search_x),
                              found=0, required=k_override)
    primes = primes_with_digit_sum(g, floor, search_x, l, k_override)
    if len(primes) < k_override:
        raise InfeasibleError("only {} primes below {} have digit sum {}, need {}".format(
            len(primes), search_x, l, k_override), found=len(primes), required=k_override, l=l)
    plan = DigitRunPlan(g, K, k_required(K), k_override, tuple(primes), (l,) * k_override,
                        _multiplier(g, primes), "constant", _guarantee(K, k_override))
    verify_plan(plan)
    return plan


def monotone_run_plan(g: int, K: int, k_override: int, x: int, direction: str) -> DigitRunPlan:
    if direction not in ("increasing", "decreasing"):
        raise UsageError("direction must be increasing or decreasing, got {!r}".format(direction))
    _check_request(g, K, k_override)
    if x <= max(g, k_override):
        raise UsageError("x must exceed max(g, k) = {}".format(max(g, k_override)))
    with mpmath.workdps(30):
        sums = coprime_sums_above(g, DigitLawParams(g).mean_sum(x), k_override)
    if direction == "decreasing":
        sums = sums[::-1]
    primes = []
    for i, l in enumerate(sums):
        lo = 2**i * x
        found = primes_with_digit_sum(g, lo, 2 * lo, l, 1)
        if not found:
            raise InfeasibleError("no prime in [{}, {}) has digit sum {}".format(lo, 2 * lo, l),
                                  index=i + 1, l=l)
        primes.append(found[0])
    plan = DigitRunPlan(g, K, k_required(K), k_override, tuple(primes), tuple(sums),
                        _multiplier(g, primes), direction, _guarantee(K, k_override))
    verify_plan(plan)
    return plan


def plan_violations(plan: DigitRunPlan) -> List[str]:
    out = []
    ps = plan.primes
    if len(set(ps)) != len(ps):
        out.append("primes are not distinct")
    if len(ps) != plan.k_used or len(plan.target_sums) != len(ps):
        out.append("plan has {} primes and {} sums for k = {}".format(
            len(ps), len(plan.target_sums), plan.k_used))
    bound = max(plan.g, plan.k_used)
    out += ["{} is not a prime above {}".format(p, bound) for p in ps
            if p <= bound or not arith.is_prime(p)]
    out += ["s_{}({}) = {} != {}".format(plan.g, p, arith.digit_sum(p, plan.g), l)
            for p, l in zip(ps, plan.target_sums) if arith.digit_sum(p, plan.g) != l]
    # Distinct primes above k never fill every class mod a prime q <= k.
    for q in arith.primes_in(2, len(ps) + 1).tolist():
        if len({p % q for p in ps}) == q:
            out.append("primes cover every class mod {}".format(q))
    if math.gcd(plan.A, math.prod(ps)) != 1:
        out.append("A = {} shares a factor with the primes".format(plan.A))
    if plan.A <= max(ps):
        out.append("A = {} does not exceed the largest prime".format(plan.A))
    s = plan.target_sums
    ordered = {
        "constant": all(a == b for a, b in zip(s, s[1:])),
        "increasing": all(a < b for a, b in zip(s, s[1:])),
        "decreasing": all(a > b for a, b in zip(s, s[1:])),
    }
    if not ordered.get(plan.mode, False):
        out.append("sums {} are not {}".format(list(s), plan.mode))
    return out


def verify_plan(plan: DigitRunPlan):
    bad = plan_violations(plan)
    if bad:
        raise InternalConsistencyError("digit plan is broken: " + "; ".join(bad))


def concat_identity_check(g: int, Npow: int, n: int, b: int) -> bool:
    """s_g(g^Npow * n + b) == s_g(n) + s_g(b) for 0 <= b < g^Npow."""
    if not 0 <= b < g**Npow:
        raise UsageError("b = {} is outside [0, {}^{})".format(b, g, Npow))
    return arith.digit_sum(g**Npow * n + b, g) == arith.digit_sum(n, g) + arith.digit_sum(b, g)


def candidate_sums(plan: DigitRunPlan, n: int) -> List[int]:
    if n < 0:
        raise UsageError("n must be nonnegative, got {}".format(n))
    out = []
    sn = arith.digit_sum(n, plan.g)
    for p in plan.primes:
        s = arith.digit_sum(plan.A * n + p, plan.g)
        if s != sn + arith.digit_sum(p, plan.g):
            raise InternalConsistencyError("s_{}({} * {} + {}) does not split".format(
                plan.g, plan.A, n, p))
        out.append(s)
    return out


def write_plan(plan: DigitRunPlan, fh: TextIO):
    json.dump(plan.as_dict(), fh, indent=2)
    fh.write("\n")


def write_histogram_csv(table: Dict[int, tuple], fh: TextIO):
    fh.write("l,observed,predicted,ratio\n")
    for l, (obs, pred, ratio) in sorted(table.items()):
        fh.write("{},{},{},{}\n".format(
            l, obs, "" if pred is None else "{:.6f}".format(pred),
            "" if ratio is None else "{:.6f}".format(ratio)))
