import io
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from primeruns import mk, simplex
from primeruns.errors import UsageError

ROOT34 = (8 + math.sqrt(34)) / 10


def test_dirichlet_integral():
    assert simplex.dirichlet_integral([0]) == 1
    assert simplex.dirichlet_integral([0, 0]) == Fraction(1, 2)
    assert simplex.dirichlet_integral([1, 1]) == Fraction(1, 24)
    assert simplex.dirichlet_integral([0, 0], 2) == Fraction(1, 12)
    assert simplex.simplex_monomial_integral(3, [2, 0, 1]) == Fraction(2, 720)
    with pytest.raises(UsageError):
        simplex.simplex_monomial_integral(2, [1])
    with pytest.raises(UsageError):
        simplex.dirichlet_integral([-1])


def test_polynomial_arithmetic():
    P = simplex.basis_polynomial(2, 1, 0)
    assert P.terms == {(0, 0): 1, (1, 0): -1, (0, 1): -1}
    assert P.degree == 1
    assert (P * P).degree == 2
    assert (P + P.scale(-1)).is_zero()
    assert P([Fraction(1, 4), Fraction(1, 4)]) == Fraction(1, 2)
    # zero outside the simplex, the raw polynomial is not
    assert P([1, 1]) == 0 and P.evaluate([1, 1]) == -1
    Q = simplex.basis_polynomial(2, 0, 1)
    assert Q.terms == {(2, 0): 1, (0, 2): 1}
    assert simplex.combination(2, {(1, 0): 2, (0, 1): 1}) == P.scale(2) + Q
    with pytest.raises(UsageError):
        simplex.SimplexPolynomial(0)
    with pytest.raises(UsageError):
        simplex.SimplexPolynomial(2, {(1,): 1})


def test_functionals_constant():
    for k in range(1, 6):
        F = simplex.SimplexPolynomial.constant(k)
        assert simplex.I_functional(F) == Fraction(1, math.factorial(k))
        assert simplex.J_functional(F, 1) == Fraction(2, math.factorial(k + 1))
        assert simplex.J_sum(F) == k * Fraction(2, math.factorial(k + 1))


def test_functionals_mismatch():
    with pytest.raises(UsageError):
        simplex.I_bilinear(simplex.SimplexPolynomial.constant(1), simplex.SimplexPolynomial.constant(2))
    with pytest.raises(UsageError):
        simplex.J_bilinear(simplex.SimplexPolynomial.constant(2), simplex.SimplexPolynomial.constant(2), 3)


@pytest.mark.parametrize("k", [1, 2])
def test_adaptive_agrees(k):
    F = simplex.combination(k, {(1, 0): 1, (0, 1): Fraction(1, 3)})
    I, Js = mk.adaptive_functionals(F)
    assert I == pytest.approx(float(simplex.I_functional(F)), rel=1e-8)
    for m, J in enumerate(Js, 1):
        assert J == pytest.approx(float(simplex.J_functional(F, m)), rel=1e-8)
    assert mk.adaptive_integral(F) == pytest.approx(float(simplex.I_bilinear(
        F, simplex.SimplexPolynomial.constant(k))), rel=1e-8)


@pytest.mark.slow
def test_adaptive_agrees_three():
    F = simplex.combination(3, {(0, 0): 1, (1, 0): 2, (0, 1): 1})
    I, Js = mk.adaptive_functionals(F)
    assert I == pytest.approx(float(simplex.I_functional(F)), rel=1e-7)
    assert sum(Js) == pytest.approx(float(simplex.J_sum(F)), rel=1e-7)


def monomial_cases(k):
    return [a for a in itertools.product(range(7), repeat=k) if sum(a) <= 6]


@pytest.mark.parametrize("k", [1, 2, pytest.param(3, marks=pytest.mark.slow)])
def test_monomials_against_adaptive(k):
    for a in monomial_cases(k):
        F = simplex.SimplexPolynomial(k, {a: 1})
        assert mk.adaptive_integral(F) == pytest.approx(
            float(simplex.simplex_monomial_integral(k, a)), rel=1e-9)


def test_adaptive_limit():
    with pytest.raises(UsageError):
        mk.adaptive_integral(simplex.SimplexPolynomial.constant(4))


def test_basis_keys():
    assert mk.basis_keys(0) == [(0, 0)]
    assert mk.basis_keys(1) == [(0, 0), (1, 0)]
    assert mk.basis_keys(3) == [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (3, 0)]
    with pytest.raises(UsageError):
        mk.basis_keys(-1)


def test_gram_matrices_two():
    forms = mk.functional_forms(2, 1)
    assert forms.gram_I == ((Fraction(1, 2), Fraction(1, 6)), (Fraction(1, 6), Fraction(1, 12)))
    assert forms.gram_J == ((Fraction(2, 3), Fraction(1, 4)), (Fraction(1, 4), Fraction(1, 10)))


@pytest.mark.parametrize("k, degree", [
    (1, 3), (2, 3),
    pytest.param(3, 2, marks=pytest.mark.slow),
    pytest.param(3, 3, marks=pytest.mark.slow),
])
def test_gram_against_adaptive(k, degree):
    forms = mk.functional_forms(k, degree)
    n = len(forms.basis)
    for i, j in itertools.combinations_with_replacement(range(n), 2):
        # I(b_i + b_j) = I_ii + 2 I_ij + I_jj, the same for the J form
        F = forms.basis[i] + forms.basis[j]
        I, Js = mk.adaptive_functionals(F)
        expected_I = forms.gram_I[i][i] + 2 * forms.gram_I[i][j] + forms.gram_I[j][j]
        expected_J = forms.gram_J[i][i] + 2 * forms.gram_J[i][j] + forms.gram_J[j][j]
        assert I == pytest.approx(float(expected_I), rel=1e-7)
        assert sum(Js) == pytest.approx(float(expected_J), rel=1e-7)


def test_bound_scale_invariant():
    b = mk.mk_lower_bound(3, 2)
    for c in (Fraction(2), Fraction(-1, 3), Fraction(10**6, 7)):
        F = b.F.scale(c)
        assert simplex.J_sum(F) / simplex.I_functional(F) == b.bound
    forms = mk.functional_forms(3, 2)
    c = [b.coefficients.get(key, Fraction(0)) for key in forms.keys]
    scaled = [5 * x for x in c]
    assert (mk.quadratic_form(forms.gram_J, scaled) / mk.quadratic_form(forms.gram_I, scaled)
            == b.bound)


def test_bound_two():
    b = mk.mk_lower_bound(2, 1)
    assert float(b.bound) == pytest.approx(ROOT34, rel=1e-12)
    assert b.certified
    assert b.bound <= Fraction(ROOT34 + 1e-12)
    F = b.F
    assert simplex.J_sum(F) / simplex.I_functional(F) == b.bound


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_bound_degree_zero(k):
    assert mk.mk_lower_bound(k, 0).bound == Fraction(2 * k, k + 1)


@pytest.mark.parametrize("degree", [0, 1, 2, 3])
def test_unit_bound(degree):
    # for k = 1 the quotient is at most 1, attained by constants
    b = mk.mk_lower_bound(1, degree)
    assert b.bound == 1
    assert b.certified


def test_dependent_basis_pruned():
    # 1, 1 - t, (1 - t)^2 and t^2 are dependent for k = 1
    forms = mk.functional_forms(1, 2)
    assert len(forms.keys) == 4
    assert len(mk.independent_columns(forms.gram_I)) == 3
    assert mk.independent_columns([]) == []


def test_monotone_in_degree():
    bounds = [mk.mk_lower_bound(3, d).bound for d in range(4)]
    for lo, hi in zip(bounds, bounds[1:]):
        assert hi >= lo - Fraction(1, 10**12)


def test_monotone_in_k():
    bounds = [mk.mk_lower_bound(k, 2).bound for k in range(1, 5)]
    for lo, hi in zip(bounds, bounds[1:]):
        assert hi > lo


@pytest.mark.slow
def test_monotone_grid():
    grid = {(k, d): mk.mk_lower_bound(k, d).bound for k in range(1, 7) for d in range(5)}
    slack = Fraction(1, 10**12)
    for (k, d), b in grid.items():
        if d > 0:
            assert b >= grid[k, d - 1] - slack
        if k > 1:
            assert b >= grid[k - 1, d] - slack


@pytest.mark.slow
def test_bound_five():
    b = mk.mk_lower_bound(5, 3)
    assert b.bound > 2
    assert float(b.bound) == pytest.approx(2.00274719396, rel=1e-9)
    assert b.certified
    I, Js = mk.numerical_functionals(b.F)
    assert sum(Js) / I == pytest.approx(float(b.bound), rel=1e-9)


def test_numerical_functionals():
    for k in (1, 2, 3):
        F = simplex.combination(k, {(1, 0): 1, (2, 0): -1, (0, 1): 2})
        I, Js = mk.numerical_functionals(F)
        assert I == pytest.approx(float(simplex.I_functional(F)), rel=1e-10)
        assert Js == pytest.approx([float(simplex.J_functional(F, m)) for m in range(1, k + 1)],
                                   rel=1e-10)


@pytest.mark.parametrize("order, dim", [(0, 1), (2, 2), (2, 3), (3, 4)])
def test_grundmann_moeller(order, dim):
    pts, wts = mk.grundmann_moeller_rule(order, dim)
    assert wts.sum() == pytest.approx(1 / math.factorial(dim), rel=1e-12)
    assert (pts >= 0).all() and (pts.sum(axis=1) <= 1 + 1e-12).all()
    for exps in itertools.product(range(2 * order + 2), repeat=dim):
        if sum(exps) > 2 * order + 1:
            continue
        value = wts @ np.prod(pts ** np.array(exps, dtype=float), axis=1)
        assert value == pytest.approx(float(simplex.dirichlet_integral(exps)), rel=1e-9)


def test_grundmann_moeller_edges():
    pts, wts = mk.grundmann_moeller_rule(3, 0)
    assert pts.shape == (1, 0) and wts.tolist() == [1.0]
    with pytest.raises(UsageError):
        mk.grundmann_moeller_rule(-1, 2)


def test_choose_k():
    assert mk.choose_k(1, {1: "1", 2: "1.38"}) == 2
    assert mk.choose_k(2, {2: "1.38", 5: "2"}) is None
    assert mk.choose_k(2, {2: "1.38", 100: "4.5"}) == 100
    assert mk.choose_k(1, {2: mk.mk_lower_bound(2, 0)}) == 2
    # k = 1 never qualifies
    assert mk.choose_k(1, {1: "5"}) is None


def test_asymptotic_comparison():
    c = mk.asymptotic_comparison(100, 4)
    assert c["rhs"] == pytest.approx(-0.4492, abs=1e-4)
    assert c["exceeds"]
    with pytest.raises(UsageError):
        mk.asymptotic_comparison(15, 4)


def test_bounds_csv():
    fh = io.StringIO()
    mk.write_bounds_csv(mk.bounds_table([1, 2], [0]), fh)
    assert fh.getvalue().splitlines() == [
        "k,degree,bound,certified",
        "1,0,1.000000000000,1",
        "2,0,1.333333333333,1",
    ]


def test_bad_k():
    with pytest.raises(UsageError):
        mk.mk_lower_bound(0, 1)
