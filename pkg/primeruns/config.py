# config.py
#
# Resource limits and the key-value configuration file read by `--config`.
#
# The file format is one `key = value` pair per line. Everything after a `#`
# is a comment and blank lines are ignored, e.g.
#
#   # sieve run for the rearrangement check
#   N = 10000
#   k = 2
#   theta_num = 1
#   theta_den = 5
#   tuple = factorial
#   W_primes = 2, 3, 5
#   F = 1,0=1
#
# Keys are case-sensitive. Unknown keys are reported as configuration errors
# so that a typo never silently falls back to a default.

import dataclasses
import logging
import re
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import ConfigurationError

logger = logging.getLogger("primeruns.config")


@dataclasses.dataclass(frozen=True)
class Limits:
    # Largest smallest-prime-factor table built in memory (uint32 entries).
    max_table_limit: int = 10**8
    # Divisor-tuple enumeration is bounded by (#squarefree <= R)^k.
    max_k: int = 4
    max_R: int = 10**4
    # Cap on (d, e) pairs visited by the rearranged S1 sum.
    max_pairs: int = 4 * 10**6
    # Expanding run searches stop at this bound.
    search_cap: int = 2**10 * 10**6


DEFAULT_LIMITS = Limits()

SIEVE_KEYS = {
    "N", "k", "theta_num", "theta_den", "tuple", "sign", "W_primes",
    "z1", "z2", "z3", "variant", "spacing", "width", "base", "sizes",
    "p_bad", "F", "max_k", "max_R",
}

_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")


def read_config(path: str, allowed=SIEVE_KEYS) -> Dict[str, str]:
    values: Dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0]
            if not line.strip():
                continue
            m = _LINE.match(line)
            if not m:
                raise ConfigurationError(
                    "{}:{}: expected `key = value`".format(path, lineno))
            key, value = m.group(1), m.group(2)
            if key not in allowed:
                raise ConfigurationError(
                    "{}:{}: unknown key {!r}".format(path, lineno, key))
            if key in values:
                logger.warning("%s:%d: %s overrides an earlier value", path, lineno, key)
            values[key] = value
    return values


def parse_int(values: Dict[str, str], key: str, default: Optional[int] = None) -> Optional[int]:
    if key not in values:
        return default
    try:
        return int(values[key])
    except ValueError:
        raise ConfigurationError("{} must be an integer, got {!r}".format(key, values[key]))


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in re.split(r"[,\s]+", text.strip()) if part]
    except ValueError:
        raise ConfigurationError("expected a comma-separated integer list, got {!r}".format(text))


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigurationError("expected a rational number, got {!r}".format(text))


# Coefficients of F over the symmetric basis (1 - P1)^a * P2^b, written as
# `a,b=c; a,b=c; ...` with rational c.
def parse_basis_coefficients(text: str) -> Dict[Tuple[int, int], Fraction]:
    coefficients: Dict[Tuple[int, int], Fraction] = {}
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        m = re.fullmatch(r"(\d+)\s*,\s*(\d+)\s*=\s*(\S+)", item)
        if not m:
            raise ConfigurationError("bad F term {!r}; expected `a,b=c`".format(item))
        key = (int(m.group(1)), int(m.group(2)))
        coefficients[key] = coefficients.get(key, Fraction(0)) + parse_fraction(m.group(3))
    if not coefficients:
        raise ConfigurationError("F has no terms")
    return coefficients


def limits_from(values: Dict[str, str], base: Limits = DEFAULT_LIMITS) -> Limits:
    return dataclasses.replace(
        base,
        max_k=parse_int(values, "max_k", base.max_k),
        max_R=parse_int(values, "max_R", base.max_R),
    )
