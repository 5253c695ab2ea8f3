# simplex.py
#
# Polynomials on the standard k-simplex {t_i >= 0, t_1 + ... + t_k <= 1} with
# exact rational coefficients, and the two quadratic functionals of the sieve
# weight function F:
#
#   I(F)     = integral of F^2 over the simplex
#   J_m(F)   = integral over the remaining k - 1 coordinates of
#              (integral of F dt_m)^2
#
# F is taken to vanish outside the simplex, so the inner integral of J_m runs
# from 0 to 1 - (sum of the other coordinates). Everything reduces to Dirichlet
# integrals of monomials, which are exact rationals.

import functools
import itertools
import logging
import math
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import gmpy2
import sympy

from .errors import UsageError

logger = logging.getLogger("primeruns.simplex")

Exponents = Tuple[int, ...]


@functools.lru_cache(maxsize=None)
def _factorial(n: int) -> int:
    return math.factorial(n)


def dirichlet_integral(exponents: Sequence[int], slack: int = 0) -> Fraction:
    """Integral of prod t_i^a_i * (1 - sum t_i)^slack over the n-simplex.

    Equals prod(a_i!) * slack! / (n + sum(a_i) + slack)!.
    """
    if any(a < 0 for a in exponents) or slack < 0:
        raise UsageError("exponents must be nonnegative: {} {}".format(list(exponents), slack))
    num = math.prod(_factorial(a) for a in exponents) * _factorial(slack)
    return Fraction(num, _factorial(len(exponents) + sum(exponents) + slack))


def simplex_monomial_integral(k: int, exponents: Sequence[int]) -> Fraction:
    if len(exponents) != k:
        raise UsageError("expected {} exponents, got {}".format(k, len(exponents)))
    return dirichlet_integral(exponents)


class SimplexPolynomial:
    """Sum of c * t^a over exponent tuples a, zero outside the simplex."""

    def __init__(self, k: int, terms: Mapping[Exponents, Fraction] = None):
        if k < 1:
            raise UsageError("simplex dimension must be at least 1, got {}".format(k))
        self.k = k
        self.terms: Dict[Exponents, Fraction] = {}
        for a, c in (terms or {}).items():
            a = tuple(a)
            if len(a) != k or any(e < 0 for e in a):
                raise UsageError("bad exponent tuple {} for k={}".format(a, k))
            c = Fraction(c)
            if c:
                self.terms[a] = self.terms.get(a, Fraction(0)) + c
        self.terms = {a: c for a, c in self.terms.items() if c}

    @classmethod
    def constant(cls, k: int, c=1) -> "SimplexPolynomial":
        return cls(k, {(0,) * k: Fraction(c)})

    @classmethod
    def from_sympy(cls, k: int, expr, symbols) -> "SimplexPolynomial":
        poly = sympy.Poly(expr, *symbols, domain="QQ")
        return cls(k, {m: Fraction(int(c.numerator), int(c.denominator))
                       for m, c in poly.terms()})

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, SimplexPolynomial) and self.k == other.k \
            and self.terms == other.terms

    def __repr__(self):
        return "SimplexPolynomial({}, {})".format(self.k, self.terms)

    def __add__(self, other: "SimplexPolynomial") -> "SimplexPolynomial":
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = terms.get(a, Fraction(0)) + c
        return SimplexPolynomial(self.k, terms)

    def scale(self, c) -> "SimplexPolynomial":
        c = Fraction(c)
        return SimplexPolynomial(self.k, {a: c * v for a, v in self.terms.items()})

    def __mul__(self, other: "SimplexPolynomial") -> "SimplexPolynomial":
        terms: Dict[Exponents, Fraction] = {}
        for (a, c), (b, d) in itertools.product(self.terms.items(), other.terms.items()):
            e = tuple(x + y for x, y in zip(a, b))
            terms[e] = terms.get(e, Fraction(0)) + c * d
        return SimplexPolynomial(self.k, terms)

    def evaluate(self, x: Sequence) -> Fraction:
        """Polynomial value at x, ignoring the support."""
        return sum((c * math.prod(Fraction(xi) ** e for xi, e in zip(x, a) if e)
                    for a, c in self.terms.items()), Fraction(0))

    def __call__(self, x: Sequence) -> Fraction:
        if len(x) != self.k:
            raise UsageError("expected a point in {} coordinates".format(self.k))
        if any(xi < 0 for xi in x) or sum(x) > 1:
            return Fraction(0)
        return self.evaluate(x)

    def as_float_function(self):
        """Fast float evaluation (support included) for numerical quadrature."""
        items = [(a, float(c)) for a, c in self.terms.items()]

        def f(*x):
            if min(x) < 0 or sum(x) > 1 + 1e-15:
                return 0.0
            return sum(c * math.prod(xi ** e for xi, e in zip(x, a)) for a, c in items)
        return f


def _mpq_terms(F: SimplexPolynomial):
    return [(a, gmpy2.mpq(c.numerator, c.denominator)) for a, c in F.terms.items()]


def I_bilinear(F: SimplexPolynomial, G: SimplexPolynomial) -> Fraction:
    """Integral of F * G over the simplex."""
    if F.k != G.k:
        raise UsageError("dimension mismatch: {} vs {}".format(F.k, G.k))
    k = F.k
    total = gmpy2.mpq(0)
    g_terms = _mpq_terms(G)
    for a, c in _mpq_terms(F):
        for b, d in g_terms:
            e = [x + y for x, y in zip(a, b)]
            total += c * d * math.prod(_factorial(x) for x in e) / _factorial(k + sum(e))
    return Fraction(int(total.numerator), int(total.denominator))


def I_functional(F: SimplexPolynomial) -> Fraction:
    return I_bilinear(F, F)


def _inner_terms(F: SimplexPolynomial, m: int):
    """Integral of F over t_m in [0, 1 - s]: terms (rest, slack, coefficient)."""
    out = []
    for a, c in _mpq_terms(F):
        rest = a[:m - 1] + a[m:]
        out.append((rest, a[m - 1] + 1, c / (a[m - 1] + 1)))
    return out


def J_bilinear(F: SimplexPolynomial, G: SimplexPolynomial, m: int) -> Fraction:
    if F.k != G.k:
        raise UsageError("dimension mismatch: {} vs {}".format(F.k, G.k))
    if not 1 <= m <= F.k:
        raise UsageError("m must lie in 1..{}, got {}".format(F.k, m))
    n = F.k - 1
    total = gmpy2.mpq(0)
    g_inner = _inner_terms(G, m)
    for ra, sa, c in _inner_terms(F, m):
        for rb, sb, d in g_inner:
            e = [x + y for x, y in zip(ra, rb)]
            s = sa + sb
            total += c * d * math.prod(_factorial(x) for x in e) * _factorial(s) \
                / _factorial(n + sum(e) + s)
    return Fraction(int(total.numerator), int(total.denominator))


def J_functional(F: SimplexPolynomial, m: int) -> Fraction:
    return J_bilinear(F, F, m)


def J_sum(F: SimplexPolynomial) -> Fraction:
    return sum((J_functional(F, m) for m in range(1, F.k + 1)), Fraction(0))


def coordinates(k: int):
    return sympy.symbols("t1:{}".format(k + 1))


def basis_polynomial(k: int, a: int, b: int) -> SimplexPolynomial:
    """(1 - P1)^a * P2^b with P1 = sum t_i and P2 = sum t_i^2."""
    ts = coordinates(k)
    expr = (1 - sum(ts)) ** a * sum(t ** 2 for t in ts) ** b
    return SimplexPolynomial.from_sympy(k, sympy.expand(expr), ts)


def combination(k: int, coefficients: Mapping[Tuple[int, int], Fraction]) -> SimplexPolynomial:
    F = SimplexPolynomial(k)
    for (a, b), c in sorted(coefficients.items()):
        F = F + basis_polynomial(k, a, b).scale(c)
    return F
