# mk.py
#
# Lower bounds for M_k = sup over F of (J_1(F) + ... + J_k(F)) / I(F).
#
# F is restricted to the span of the symmetric polynomials (1 - P1)^a * P2^b
# (P1 = sum t_i, P2 = sum t_i^2) with a + 2b <= degree. On that span both
# functionals are quadratic forms, so the sup is the largest generalized
# eigenvalue of the pair (gram_J, gram_I). Symmetric F make every J_m equal,
# hence gram_J = k * (Gram matrix of J_1).
#
# The Gram matrices are exact rationals. The eigenproblem is solved in
# high-precision floating point (Cholesky reduction to a standard symmetric
# problem), the eigenvector is rounded to rationals, and the bound reported is
# the exact Rayleigh quotient of that rational F; any F gives a lower bound, so
# the value is certified.

import csv
import dataclasses
import functools
import itertools
import logging
import math
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, TextIO, Tuple

import mpmath
import numpy as np
import sympy
from scipy import integrate

from . import simplex
from .errors import UsageError
from .simplex import SimplexPolynomial

logger = logging.getLogger("primeruns.mk")

EIG_DPS = 50
# Denominator cap when rounding the optimal coefficients.
MAX_DENOMINATOR = 10**15
CERTIFY_RTOL = 1e-9


def basis_keys(degree: int) -> List[Tuple[int, int]]:
    if degree < 0:
        raise UsageError("degree must be nonnegative, got {}".format(degree))
    return [(a, b) for a in range(degree + 1) for b in range(degree // 2 + 1) if a + 2 * b <= degree]


def symmetric_basis(k: int, degree: int) -> List[Tuple[Tuple[int, int], SimplexPolynomial]]:
    return [(key, simplex.basis_polynomial(k, *key)) for key in basis_keys(degree)]


@dataclasses.dataclass(frozen=True)
class FunctionalForms:
    keys: Tuple[Tuple[int, int], ...]
    basis: Tuple[SimplexPolynomial, ...]
    gram_I: Tuple[Tuple[Fraction, ...], ...]
    gram_J: Tuple[Tuple[Fraction, ...], ...]


def functional_forms(k: int, degree: int) -> FunctionalForms:
    items = symmetric_basis(k, degree)
    keys = tuple(key for key, _ in items)
    basis = tuple(f for _, f in items)
    n = len(basis)
    gi = [[Fraction(0)] * n for _ in range(n)]
    gj = [[Fraction(0)] * n for _ in range(n)]
    for i, j in itertools.combinations_with_replacement(range(n), 2):
        gi[i][j] = gi[j][i] = simplex.I_bilinear(basis[i], basis[j])
        gj[i][j] = gj[j][i] = k * simplex.J_bilinear(basis[i], basis[j], 1)
    return FunctionalForms(keys, basis, tuple(map(tuple, gi)), tuple(map(tuple, gj)))


def independent_columns(gram: Sequence[Sequence[Fraction]]) -> List[int]:
    """Pivot columns of the exact row echelon form."""
    if not gram:
        return []
    _, pivots = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row]
                              for row in gram]).rref()
    return list(pivots)


def quadratic_form(gram, c: Sequence[Fraction]) -> Fraction:
    n = len(c)
    return sum((c[i] * c[j] * gram[i][j] for i in range(n) for j in range(n)), Fraction(0))


def _rationalize(x: mpmath.mpf) -> Fraction:
    return Fraction(mpmath.nstr(x, 40)).limit_denominator(MAX_DENOMINATOR)


def top_generalized_eigenvector(gram_I, gram_J) -> Tuple[mpmath.mpf, List[mpmath.mpf]]:
    """Largest lambda with gram_J v = lambda gram_I v, gram_I positive definite."""
    n = len(gram_I)
    with mpmath.workdps(EIG_DPS):
        A = mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in row] for row in gram_I])
        B = mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in row] for row in gram_J])
        L = mpmath.cholesky(A)
        Linv = mpmath.inverse(L)
        C = Linv * B * Linv.T
        # symmetrize away rounding before the symmetric solver
        C = (C + C.T) / 2
        E, Q = mpmath.eigsy(C)
        top = max(range(n), key=lambda j: E[j])
        y = mpmath.matrix([Q[i, top] for i in range(n)])
        v = Linv.T * y
        return E[top], [v[i] for i in range(n)]


@dataclasses.dataclass(frozen=True)
class MkBound:
    k: int
    degree: int
    bound: Fraction
    eigenvalue: float
    coefficients: Dict[Tuple[int, int], Fraction]
    certified: bool

    @functools.cached_property
    def F(self) -> SimplexPolynomial:
        return simplex.combination(self.k, self.coefficients)


def mk_lower_bound(k: int, degree: int) -> MkBound:
    if k < 1:
        raise UsageError("k must be at least 1, got {}".format(k))
    forms = functional_forms(k, degree)
    keep = independent_columns(forms.gram_I)
    if not keep:
        raise UsageError("empty basis for k={} degree={}".format(k, degree))
    if len(keep) < len(forms.keys):
        logger.debug("k=%d degree=%d: dropped dependent basis terms %s", k, degree,
                     [forms.keys[i] for i in range(len(forms.keys)) if i not in keep])
    gi = [[forms.gram_I[i][j] for j in keep] for i in keep]
    gj = [[forms.gram_J[i][j] for j in keep] for i in keep]

    eigenvalue, v = top_generalized_eigenvector(gi, gj)
    with mpmath.workdps(EIG_DPS):
        scale = max(v, key=abs)
        c = [_rationalize(x / scale) for x in v]
    bound = quadratic_form(gj, c) / quadratic_form(gi, c)
    eig = float(eigenvalue)
    certified = abs(float(bound) - eig) <= CERTIFY_RTOL * abs(eig)
    if not certified:
        logger.warning("k=%d degree=%d: rational quotient %.12g differs from eigenvalue %.12g",
                       k, degree, float(bound), eig)
    coefficients = {forms.keys[i]: ci for i, ci in zip(keep, c) if ci}
    logger.info("M_%d >= %.10f (degree %d)", k, float(bound), degree)
    return MkBound(k, degree, bound, eig, coefficients, certified)


def choose_k(K: int, bounds: Mapping[int, object]) -> Optional[int]:
    """Smallest k >= 2 in the table with ceil(bound / 4) > K - 1."""
    for k in sorted(bounds):
        if k < 2:
            continue
        b = Fraction(bounds[k]) if not isinstance(bounds[k], MkBound) else bounds[k].bound
        if math.ceil(b / 4) > K - 1:
            return k
    return None


def asymptotic_comparison(k: int, bound) -> dict:
    if k < 16:
        raise UsageError("the comparison needs k >= 16, got {}".format(k))
    rhs = float(mpmath.log(k) - 2 * mpmath.log(mpmath.log(k)) - 2)
    return {"k": k, "bound": bound, "rhs": rhs, "exceeds": float(bound) > rhs}


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def grundmann_moeller_rule(order: int, dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """Points and weights on the unit dim-simplex, exact to degree 2*order + 1."""
    if order < 0 or dim < 0:
        raise UsageError("bad cubature request: order={} dim={}".format(order, dim))
    if dim == 0:
        return np.zeros((1, 0)), np.ones(1)
    s, n = order, dim
    d = 2 * s + 1
    points, weights = [], []
    for i in range(s + 1):
        w = Fraction((-1) ** i * (d + n - 2 * i) ** d,
                     2 ** (2 * s) * math.factorial(i) * math.factorial(d + n - i))
        denom = d + n - 2 * i
        for beta in _compositions(s - i, n + 1):
            points.append([(2 * b + 1) / denom for b in beta[1:]])
            weights.append(float(w))
    return np.array(points), np.array(weights)


def _vectorized(F: SimplexPolynomial):
    exps = np.array(list(F.terms), dtype=float).reshape(-1, F.k)
    coeffs = np.array([float(c) for c in F.terms.values()])

    def f(X: np.ndarray) -> np.ndarray:
        if coeffs.size == 0:
            return np.zeros(X.shape[0])
        return np.prod(X[:, None, :] ** exps[None, :, :], axis=2) @ coeffs
    return f


def numerical_functionals(F: SimplexPolynomial) -> Tuple[float, List[float]]:
    """I(F) and J_1..J_k(F) in floating point by cubature."""
    deg = F.degree
    f = _vectorized(F)
    pts, wts = grundmann_moeller_rule(deg, F.k)
    I = float(wts @ f(pts) ** 2)
    gl_x, gl_w = np.polynomial.legendre.leggauss(deg + 1)
    outer_pts, outer_wts = grundmann_moeller_rule(deg + 1, F.k - 1)
    Js = []
    for m in range(F.k):
        vals = []
        for t in outer_pts:
            top = 1.0 - t.sum()
            nodes = (gl_x + 1) * top / 2
            X = np.insert(np.repeat(t[None, :], nodes.size, axis=0), m, nodes, axis=1)
            vals.append(top / 2 * (gl_w @ f(X)))
        Js.append(float(outer_wts @ np.array(vals) ** 2))
    return I, Js


def _simplex_ranges(n: int):
    return [lambda *outer: (0.0, max(0.0, 1.0 - sum(outer)))] * n


def adaptive_integral(F: SimplexPolynomial) -> float:
    """Integral of F over the simplex by adaptive quadrature (k <= 3)."""
    if F.k > 3:
        raise UsageError("adaptive quadrature is limited to k <= 3")
    f = F.as_float_function()
    return integrate.nquad(f, _simplex_ranges(F.k))[0]


def adaptive_functionals(F: SimplexPolynomial) -> Tuple[float, List[float]]:
    if F.k > 3:
        raise UsageError("adaptive quadrature is limited to k <= 3")
    f = F.as_float_function()
    I = integrate.nquad(lambda *x: f(*x) ** 2, _simplex_ranges(F.k))[0]
    Js = []
    for m in range(F.k):
        def inner(*rest, m=m):
            top = max(0.0, 1.0 - sum(rest))
            g = lambda t: f(*(rest[:m] + (t,) + rest[m:]))
            return integrate.quad(g, 0.0, top)[0] ** 2
        if F.k == 1:
            Js.append(inner())
        else:
            Js.append(integrate.nquad(inner, _simplex_ranges(F.k - 1))[0])
    return I, Js


def bounds_table(ks: Iterable[int], degrees: Iterable[int]) -> List[MkBound]:
    degrees = list(degrees)
    return [mk_lower_bound(k, d) for k in ks for d in degrees]


def write_bounds_csv(rows: Iterable[MkBound], fh: TextIO):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["k", "degree", "bound", "certified"])
    for r in rows:
        writer.writerow([r.k, r.degree, "{:.12f}".format(float(r.bound)), int(r.certified)])
