# tuples.py
#
# Admissible tuples and the residue-class constructions that pick nu mod W.
#
# Every prime p up to the cutoff z3 gets a residue nu_p, and the residues are
# combined by CRT into nu mod W (W the product of those primes). The choice for
# each prime is recorded with its provenance:
#
#   Fixed         nu = 1 mod 2, or a fallback residue in basic_selection
#   Default       nu avoids -h_i and 1 - h_i mod p for every i, so p divides
#                 none of n + h_i and n + h_i - 1
#   GreedySet(i)  nu = 1 - h_i mod p, so p | n + h_i - 1
#   Block(h)      nu = -h mod p, so p | n + h (h an interior even offset)
#
# The cutoffs split the odd primes into three ranges: defaults below z1,
# greedy or fixed-size sets of primes in (z1, z2], and block primes in
# (z2, z3]. The asymptotic cutoff formulas only come into play for enormous N,
# so RangePlan takes explicit cutoffs and default_plan clamps the formulas from
# below.
#
# The selections are only sound when gcd(nu + h_i, W) = 1 for all i. At small
# cutoffs a set or block prime can break it (e.g. 5 | 0 - 24 + 1), so set and
# block primes are filtered through eligibility rules before they are used;
# ineligible primes fall through to a default selection.

import dataclasses
import logging
import math
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import mpmath
from sympy import primerange
from sympy.ntheory.modular import crt

from . import arith
from .config import parse_fraction, parse_int, parse_int_list
from .errors import ConfigurationError, InfeasibleError, InternalConsistencyError, UsageError

logger = logging.getLogger("primeruns.tuples")

VARIANTS = ("phi", "sigma", "omega_count")

# Config keys that shape a RangePlan.
PLAN_KEYS = ("z1", "z2", "z3", "variant", "spacing", "width", "base", "sizes")

# Precision (decimal digits) for the greedy log sums.
LOG_DPS = 40


@dataclasses.dataclass(frozen=True)
class AdmissibleTuple:
    """h_1, ..., h_k in index order; `entries` is the same set sorted."""
    order: Tuple[int, ...]

    @property
    def entries(self) -> Tuple[int, ...]:
        return tuple(sorted(self.order))

    @property
    def k(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)


@dataclasses.dataclass(frozen=True)
class Admissibility:
    admissible: bool
    # p -> a residue class the entries omit, for every prime p <= k
    omitted: Dict[int, int]
    covering_prime: Optional[int] = None

    def __bool__(self):
        return self.admissible


def is_admissible(H: Sequence[int]) -> Admissibility:
    if len(set(H)) != len(H):
        raise UsageError("tuple entries must be distinct: {}".format(list(H)))
    omitted = {}
    for p in primerange(2, len(H) + 1):
        occupied = {h % p for h in H}
        free = [r for r in range(p) if r not in occupied]
        if not free:
            return Admissibility(False, omitted, p)
        omitted[p] = free[0]
    return Admissibility(True, omitted)


def factorial_tuple(k: int, sign: int = 1) -> AdmissibleTuple:
    """h_i = sign * (i - 1) * (2k)!"""
    if k < 1:
        raise UsageError("tuple size must be at least 1, got {}".format(k))
    if sign not in (1, -1):
        raise UsageError("sign must be +1 or -1, got {}".format(sign))
    step = math.factorial(2 * k)
    return AdmissibleTuple(tuple(sign * i * step for i in range(k)))


def parse_tuple(text: str, k: Optional[int] = None, sign: int = 1) -> AdmissibleTuple:
    """`factorial` / `factorial-` (needs k) or an explicit comma list."""
    text = text.strip()
    if text in ("factorial", "factorial+", "factorial-"):
        if k is None:
            raise UsageError("tuple {!r} needs k".format(text))
        return factorial_tuple(k, -1 if text.endswith("-") else sign)
    try:
        entries = tuple(int(part) for part in text.replace(" ", "").split(",") if part)
    except ValueError:
        raise UsageError("bad tuple {!r}".format(text))
    if not entries:
        raise UsageError("empty tuple")
    if len(set(entries)) != len(entries):
        raise UsageError("tuple entries must be distinct: {}".format(text))
    return AdmissibleTuple(entries)


@dataclasses.dataclass(frozen=True)
class Provenance:
    kind: str
    index: Optional[int] = None

    def __str__(self):
        if self.index is None:
            return self.kind
        return "{}({})".format(self.kind, self.index)


FIXED = Provenance("Fixed")
DEFAULT = Provenance("Default")


@dataclasses.dataclass(frozen=True)
class Assignment:
    p: int
    residue: int
    provenance: Provenance


@dataclasses.dataclass(frozen=True)
class ResidueSelection:
    assignments: Tuple[Assignment, ...]
    W: int
    nu: int

    @property
    def primes(self) -> List[int]:
        return [a.p for a in self.assignments]

    def by_kind(self, kind: str) -> List[Assignment]:
        return [a for a in self.assignments if a.provenance.kind == kind]

    def as_dict(self) -> dict:
        return {
            "W": str(self.W),
            "nu": str(self.nu),
            "assignments": [{"p": a.p, "residue": a.residue, "provenance": str(a.provenance)}
                            for a in self.assignments],
        }


def combine(assignments: Sequence[Assignment]) -> ResidueSelection:
    """CRT-combines per-prime residues."""
    assignments = tuple(sorted(assignments, key=lambda a: a.p))
    if not assignments:
        return ResidueSelection((), 1, 0)
    ps = [a.p for a in assignments]
    if len(set(ps)) != len(ps):
        raise InternalConsistencyError("prime assigned twice: {}".format(ps))
    nu, W = crt(ps, [a.residue for a in assignments])
    return ResidueSelection(assignments, int(W), int(nu) % int(W))


def coprime_failures(sel: ResidueSelection, H: AdmissibleTuple) -> List[str]:
    """One message per prime p and offset h with p | nu + h."""
    return ["{} | nu + {}".format(a.p, h) for a in sel.assignments for h in H
            if (sel.nu + h) % a.p == 0]


def violations(sel: ResidueSelection, H: AdmissibleTuple) -> List[str]:
    """Broken postconditions of a selection, checked mod each prime."""
    out = coprime_failures(sel, H)
    for a in sel.assignments:
        if sel.nu % a.p != a.residue % a.p:
            out.append("nu != {} mod {}".format(a.residue, a.p))
        kind = a.provenance.kind
        if kind == "Default" and any((a.residue + h - 1) % a.p == 0 for h in H):
            out.append("default prime {} divides some n + h - 1".format(a.p))
        if kind == "GreedySet" and (a.residue + H.order[a.provenance.index - 1] - 1) % a.p:
            out.append("set prime {} misses n + h_{} - 1".format(a.p, a.provenance.index))
        if kind == "Block" and (a.residue + a.provenance.index) % a.p:
            out.append("block prime {} misses n + {}".format(a.p, a.provenance.index))
    return out


def default_residue(p: int, H: AdmissibleTuple) -> int:
    """Smallest nu_p with p dividing none of nu + h_i and nu + h_i - 1."""
    if p % 2 == 0:
        raise UsageError("default selections are for odd primes, got {}".format(p))
    forbidden = {(-h) % p for h in H} | {(1 - h) % p for h in H}
    for r in range(p):
        if r not in forbidden:
            return r
    raise InfeasibleError("no default residue mod {} for {}".format(p, list(H.order)),
                          prime=p)


def _parity_residue(H: AdmissibleTuple) -> int:
    parities = {h % 2 for h in H}
    if len(parities) > 1:
        raise InfeasibleError("tuple {} covers both classes mod 2".format(list(H.order)), prime=2)
    return (1 - parities.pop()) % 2


def basic_selection(H: AdmissibleTuple, primes: Sequence[int]) -> ResidueSelection:
    """Any residue choice satisfying the coprimality condition; defaults where they exist."""
    assignments = []
    for p in primes:
        if p == 2:
            assignments.append(Assignment(2, _parity_residue(H), FIXED))
            continue
        try:
            assignments.append(Assignment(p, default_residue(p, H), DEFAULT))
        except InfeasibleError:
            occupied = {(-h) % p for h in H}
            free = [r for r in range(p) if r not in occupied]
            if not free:
                raise InfeasibleError("tuple {} is not admissible mod {}".format(
                    list(H.order), p), prime=p)
            assignments.append(Assignment(p, free[0], FIXED))
    sel = combine(assignments)
    bad = coprime_failures(sel, H)
    if bad:
        raise InternalConsistencyError("; ".join(bad))
    return sel


def set_eligible(p: int, i: int, H: AdmissibleTuple) -> bool:
    """nu = 1 - h_i mod p keeps nu + h_j coprime to p and leaves every other n + h_j - 1 alone."""
    hi = H.order[i - 1]
    for j, hj in enumerate(H.order, 1):
        if (hj - hi + 1) % p == 0:
            return False
        if j != i and (hj - hi) % p == 0:
            return False
    return True


def block_eligible(p: int, h: int, H: AdmissibleTuple) -> bool:
    """nu = -h mod p keeps nu + h_i coprime to p and every n + h_i - 1 free of p."""
    return all((hi - h) % p and (hi - h - 1) % p for hi in H)


def greedy_interval_sets(candidates: Sequence[int], weight: Callable[[int], mpmath.mpf],
                         offset, intervals: Sequence[Tuple[object, object]],
                         eligible: Optional[Callable[[int, int], bool]] = None
                         ) -> List[List[int]]:
    """Disjoint sets P_1, ... with offset + sum(weight) inside interval i.

    Sets are filled in index order; each scans the unused candidates in
    ascending order, skips any that would overshoot the upper end (or are not
    eligible for that index), and stops once the lower end is reached. Skipped
    candidates stay available to later sets.
    """
    with mpmath.workdps(LOG_DPS):
        offset = mpmath.mpf(offset)
        pool = sorted(candidates)
        sets = []
        for i, (lo, hi) in enumerate(intervals, 1):
            lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
            total = offset
            chosen = []
            if total <= hi:
                for p in pool:
                    if total >= lo:
                        break
                    if eligible is not None and not eligible(p, i):
                        continue
                    w = weight(p)
                    if total + w > hi:
                        continue
                    chosen.append(p)
                    total += w
            if not lo <= total <= hi:
                raise InfeasibleError(
                    "greedy set {} reaches {} outside [{}, {}]".format(
                        i, mpmath.nstr(total, 6), mpmath.nstr(lo, 6), mpmath.nstr(hi, 6)),
                    index=i, reached=float(total))
            taken = set(chosen)
            pool = [p for p in pool if p not in taken]
            sets.append(chosen)
            logger.debug("set %d: %s (sum %s)", i, chosen, mpmath.nstr(total, 8))
    return sets


def fixed_size_sets(candidates: Sequence[int], sizes: Sequence[int],
                    eligible: Optional[Callable[[int, int], bool]] = None) -> List[List[int]]:
    if any(s < 0 for s in sizes):
        raise UsageError("set sizes must be nonnegative: {}".format(list(sizes)))
    pool = sorted(candidates)
    sets = []
    for i, size in enumerate(sizes, 1):
        chosen = [p for p in pool if eligible is None or eligible(p, i)][:size]
        if len(chosen) < size:
            raise InfeasibleError("set {} needs {} primes, {} available".format(
                i, size, len(chosen)), index=i, required=size, available=len(chosen))
        taken = set(chosen)
        pool = [p for p in pool if p not in taken]
        sets.append(chosen)
    return sets


def interior_offsets(H: AdmissibleTuple) -> List[int]:
    """Even h strictly between min(H) and max(H) with h not in H."""
    entries = H.entries
    members = set(entries)
    first = entries[0] + 1
    first += first % 2
    return [h for h in range(first, entries[-1], 2) if h not in members]


def block_assignment(H: AdmissibleTuple, range3: Sequence[int],
                     eligible: Optional[Callable[[int, int], bool]] = None) -> Dict[int, int]:
    """h -> p^(h): ascending offsets against ascending (eligible) primes."""
    offsets = interior_offsets(H)
    pool = sorted(range3)
    assigned: Dict[int, int] = {}
    for h in offsets:
        for p in pool:
            if eligible is None or eligible(p, h):
                assigned[h] = p
                pool.remove(p)
                break
    if len(assigned) < len(offsets):
        shortfall = len(offsets) - len(assigned)
        raise InfeasibleError("block assignment needs {} primes, short by {}".format(
            len(offsets), shortfall), required=len(offsets), shortfall=shortfall)
    return assigned


def iterated_log(x: float, times: int) -> float:
    """log_times x, or 0 once the iterate drops to 1 or below."""
    for _ in range(times):
        if x <= 1:
            return 0.0
        x = math.log(x)
    return x


def _mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def log_ratio_targets(k: int, variant: str = "phi", spacing=None, width=None,
                      base=0) -> List[Tuple[mpmath.mpf, mpmath.mpf]]:
    """Intervals [base + i*spacing, base + i*spacing + width] for offset + sum."""
    if variant not in ("phi", "sigma"):
        raise UsageError("log-ratio targets are for phi or sigma, got {!r}".format(variant))
    with mpmath.workdps(LOG_DPS):
        log2 = mpmath.log(2)
        spacing = 4 * log2 if spacing is None else _mpf(spacing)
        width = log2 if width is None else _mpf(width)
        base = _mpf(base)
        if spacing < 0 or width < 0:
            raise UsageError("spacing and width must be nonnegative")
        return [(base + i * spacing, base + i * spacing + width) for i in range(1, k + 1)]


def log_ratio_offset(variant: str) -> mpmath.mpf:
    with mpmath.workdps(LOG_DPS):
        return mpmath.log(2) if variant == "phi" else mpmath.log(mpmath.mpf(3) / 2)


def log_ratio_weight(variant: str) -> Callable[[int], mpmath.mpf]:
    if variant == "phi":
        return lambda p: mpmath.log(mpmath.mpf(p) / (p - 1))
    return lambda p: mpmath.log(mpmath.mpf(p + 1) / p)


@dataclasses.dataclass(frozen=True)
class RangePlan:
    z1: int
    z2: int
    z3: int
    variant: str
    # Target intervals for phi/sigma, set sizes for omega_count.
    intervals: Tuple[Tuple[mpmath.mpf, mpmath.mpf], ...] = ()
    sizes: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise UsageError("unknown variant {!r}; expected one of {}".format(
                self.variant, ", ".join(VARIANTS)))
        if not 2 <= self.z1 < self.z2 < self.z3:
            raise UsageError("cutoffs must satisfy 2 <= z1 < z2 < z3, got {}, {}, {}".format(
                self.z1, self.z2, self.z3))


def default_plan(N: int, k: int, variant: str = "phi", spacing=None, width=None, base=0,
                 sizes: Optional[Sequence[int]] = None) -> RangePlan:
    """Cutoffs and targets from the asymptotic formulas, clamped below at 3, 5, 7.

    spacing, width and base go to log_ratio_targets; sizes replaces the
    omega_count set sizes. Desk-scale cutoffs need both.
    """
    if variant == "omega_count":
        logN = math.log(N)
        scale = logN / max(iterated_log(N, 2), 1.0) ** 2
        raw = (scale / 4, scale / 2, scale)
        if sizes is None:
            ll, lll = iterated_log(N, 2), iterated_log(N, 3)
            sizes = [math.floor(i * ll * lll) for i in range(1, k + 1)]
        elif len(sizes) != k:
            raise UsageError("need {} set sizes, got {}".format(k, list(sizes)))
        sizes = tuple(sizes)
    else:
        raw = (iterated_log(N, 4), iterated_log(N, 3) / 2, iterated_log(N, 3))
        sizes = ()
    z1 = max(3, math.floor(raw[0]))
    z2 = max(5, math.floor(raw[1]), z1 + 1)
    z3 = max(7, math.floor(raw[2]), z2 + 1)
    intervals = ()
    if variant != "omega_count":
        intervals = tuple(log_ratio_targets(k, variant, spacing, width, base))
    return RangePlan(z1, z2, z3, variant, intervals, sizes)


def plan_from_values(values: Mapping[str, str], N: int, k: int) -> RangePlan:
    """RangePlan from config-style strings; missing keys take the default_plan values."""
    def rational(key, default=None):
        return parse_fraction(values[key]) if key in values else default

    variant = values.get("variant", "phi")
    if variant not in VARIANTS:
        raise ConfigurationError("unknown variant {!r}; expected one of {}".format(
            variant, ", ".join(VARIANTS)))
    sizes = parse_int_list(values["sizes"]) if "sizes" in values else None
    plan = default_plan(N, k, variant, rational("spacing"), rational("width"),
                        rational("base", 0), sizes)
    return dataclasses.replace(plan, z1=parse_int(values, "z1", plan.z1),
                               z2=parse_int(values, "z2", plan.z2),
                               z3=parse_int(values, "z3", plan.z3))


def assemble_selection(plan: RangePlan, H: AdmissibleTuple) -> ResidueSelection:
    assignments = [Assignment(2, _parity_residue(H), FIXED)]
    odd = [p for p in primerange(3, plan.z3 + 1)]
    range1 = [p for p in odd if p <= plan.z1]
    range2 = [p for p in odd if plan.z1 < p <= plan.z2]
    range3 = [p for p in odd if plan.z2 < p]

    for p in range1:
        assignments.append(Assignment(p, default_residue(p, H), DEFAULT))

    eligible = lambda p, i: set_eligible(p, i, H)
    if plan.variant == "omega_count":
        sets = fixed_size_sets(range2, plan.sizes, eligible)
    else:
        sets = greedy_interval_sets(range2, log_ratio_weight(plan.variant),
                                    log_ratio_offset(plan.variant), plan.intervals, eligible)
    in_sets = {}
    for i, members in enumerate(sets, 1):
        for p in members:
            in_sets[p] = i
    for p in range2:
        if p in in_sets:
            i = in_sets[p]
            assignments.append(Assignment(p, (1 - H.order[i - 1]) % p, Provenance("GreedySet", i)))
        else:
            assignments.append(Assignment(p, default_residue(p, H), DEFAULT))

    blocks = block_assignment(H, range3, lambda p, h: block_eligible(p, h, H))
    block_of = {p: h for h, p in blocks.items()}
    for p in range3:
        if p in block_of:
            h = block_of[p]
            assignments.append(Assignment(p, (-h) % p, Provenance("Block", h)))
        else:
            assignments.append(Assignment(p, default_residue(p, H), DEFAULT))

    sel = combine(assignments)
    bad = violations(sel, H)
    if bad:
        raise InternalConsistencyError("assembled selection is broken: " + "; ".join(bad))
    logger.info("assembled nu mod W over %d primes (W has %d digits)",
                len(sel.assignments), len(str(sel.W)))
    return sel


def window_check(n: int, H: AdmissibleTuple, sel: ResidueSelection) -> bool:
    """Every prime in [n + h_1, n + h_k] sits at an offset in H."""
    if n % sel.W != sel.nu:
        raise UsageError("{} is not congruent to nu mod W".format(n))
    entries = H.entries
    members = set(entries)
    for m in range(n + entries[0], n + entries[-1] + 1):
        if m - n not in members and arith.is_prime(m):
            return False
    return True
