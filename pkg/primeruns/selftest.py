# selftest.py
#
# The `selftest` command: recomputes the finite witnesses in witnesses.json and
# checks the exact identities the modules promise. Returns a list of failure
# messages; empty means everything held.

import json
import logging
import os
from fractions import Fraction
from typing import List

import sympy

from . import arith, digits, mk, runs, sieve, simplex, tuples
from .errors import PrimeRunsError

logger = logging.getLogger("primeruns.selftest")

WITNESSES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "witnesses.json")


def load_witnesses(path: str = WITNESSES) -> dict:
    with open(path) as fh:
        return json.load(fh)


def check_runs(w: dict, threads: int, progress: bool) -> List[str]:
    failures = []
    for case in w["runs"]:
        q = runs.RunQuery(runs.parse_function(case["function"]), case["mode"], case["length"])
        rec = runs.first_run(q, threads, progress=progress)
        m = case["length"]
        if list(rec.primes[:m]) != case["primes"] or list(rec.values[:m]) != case["values"]:
            failures.append("first {} {} run: got {} {}".format(
                case["function"], case["mode"], list(rec.primes), list(rec.values)))
    return failures


def check_arith(w: dict) -> List[str]:
    limit = w["arith_oracle_limit"]
    t = arith.build_factor_table(limit)
    failures = []
    for n in range(1, limit + 1):
        v = arith.arith_values(arith.factorize(n, t))
        f = sympy.factorint(n)
        expected = arith.ArithValues(int(sympy.totient(n)), int(sympy.divisor_sigma(n)),
                                     len(f), sum(f.values()), int(sympy.divisor_count(n)))
        if v != expected:
            failures.append("arith_values({}) = {}, expected {}".format(n, v, expected))
    return failures


def check_selection(w: dict) -> List[str]:
    case = w["selection"]
    H = tuples.AdmissibleTuple(tuple(case["tuple"]))
    sel = tuples.assemble_selection(tuples.RangePlan(*case["z"], case["variant"]), H)
    if (sel.W, sel.nu) != (case["W"], case["nu"]):
        return ["selection: got nu = {} mod {}".format(sel.nu, sel.W)]
    return []


def check_sieve(w: dict) -> List[str]:
    failures = []
    case = w["lambda"]
    theta = Fraction(case["theta"])
    cfg = sieve.SieveConfig(case["N"], theta, tuples.AdmissibleTuple((0,)),
                            tuples.basic_selection(tuples.AdmissibleTuple((0,)), case["W_primes"]),
                            simplex.combination(1, {(0, 0): Fraction(1)}))
    lt = sieve.lambda_table(cfg)
    if lt.R != case["R"]:
        failures.append("lambda: R = {}, expected {}".format(lt.R, case["R"]))
    for d, value in case["entries"].items():
        if lt.get((int(d),)) != Fraction(value):
            failures.append("lambda_{} = {}, expected {}".format(d, lt.get((int(d),)), value))

    for values in w["sieve_identity"]:
        cfg = sieve.sieve_config(values)
        lt = sieve.lambda_table(cfg)
        space = sieve.weighted_space(cfg, lt)
        name = "N={} k={}".format(cfg.N, cfg.k)
        if space.total != sieve.rearranged_S1(cfg, lt):
            failures.append("{}: S1 differs from its rearrangement".format(name))
        if sieve.coprimality_violations(cfg, lt):
            failures.append("{}: non-coprime pairs with members".format(name))
        if sieve.support_violations(cfg, lt):
            failures.append("{}: lambda support off its box".format(name))
        if lt.values != sieve.lambda_from_y(sieve.y_transform(lt)):
            failures.append("{}: y change of variables does not invert".format(name))
        sums = sieve.compute_S1_S2(space)
        for K in range(1, cfg.k + 1):
            if not sums.lower_bound_holds(K):
                failures.append("{}: Prob(X >= {}) below (EX - {})/k".format(name, K, K - 1))

    for case in w["error_E"]:
        E = sieve.error_E(case["N"], case["q"])
        if E != Fraction(case["E"]):
            failures.append("E({}; {}) = {}, expected {}".format(case["N"], case["q"], E, case["E"]))
    return failures


def check_mk(w: dict) -> List[str]:
    failures = []
    unit = w["mk"]["unit"]
    for d in unit["degrees"]:
        b = mk.mk_lower_bound(unit["k"], d)
        if b.bound != Fraction(unit["bound"]):
            failures.append("M_1 bound at degree {} is {}".format(d, b.bound))
    two = w["mk"]["two"]
    b = mk.mk_lower_bound(two["k"], two["degree"])
    if abs(float(b.bound) - two["bound"]) > two["tolerance"]:
        failures.append("M_2 degree 1 bound {} != {}".format(float(b.bound), two["bound"]))
    five = w["mk"]["five"]
    b = mk.mk_lower_bound(five["k"], five["degree"])
    if b.bound <= five["floor"] or not b.certified:
        failures.append("M_5 degree 3 bound {} not above {} (certified {})".format(
            float(b.bound), five["floor"], b.certified))
    I, Js = mk.numerical_functionals(b.F)
    if abs(sum(Js) / I - float(b.bound)) > 1e-9 * float(b.bound):
        failures.append("M_5 cubature gives {} against {}".format(sum(Js) / I, float(b.bound)))
    logger.info("M_5 >= %.9f", float(b.bound))
    return failures


def check_digits(w: dict) -> List[str]:
    failures = []
    cases = w["digits"]
    law = cases["law"]
    params = digits.DigitLawParams(law["g"])
    if (params.mu, params.sigma2) != (Fraction(law["mu"]), Fraction(law["sigma2"])):
        failures.append("digit law parameters for g={}".format(law["g"]))
    c = cases["constant"]
    plan = digits.constant_run_plan(c["g"], c["K"], c["k"], c["x"])
    if list(plan.primes) != c["primes"] or plan.A != c["A"] or plan.target_sums[0] != c["l"]:
        failures.append("constant plan: {}".format(plan.as_dict()))
    for mode in ("increasing", "decreasing"):
        c = cases[mode]
        plan = digits.monotone_run_plan(c["g"], c["K"], c["k"], c["x"], mode)
        if list(plan.primes) != c["primes"] or list(plan.target_sums) != c["sums"]:
            failures.append("{} plan: {}".format(mode, plan.as_dict()))
    c = cases["concat"]
    if not digits.concat_identity_check(c["g"], c["npow"], c["n"], c["b"]) \
            or arith.digit_sum(c["g"] ** c["npow"] * c["n"] + c["b"], c["g"]) != c["sum"]:
        failures.append("concatenation identity at n={} b={}".format(c["n"], c["b"]))
    for c in cases["find"]:
        found = digits.primes_with_digit_sum(c["g"], c["lo"], c["hi"], c["l"])
        if found != c["primes"]:
            failures.append("primes in [{}, {}) with digit sum {}: {}".format(
                c["lo"], c["hi"], c["l"], found))
    return failures


def run(threads: int = 1, progress: bool = False, path: str = WITNESSES) -> List[str]:
    w = load_witnesses(path)
    failures: List[str] = []
    checks = [
        ("arith", lambda: check_arith(w)),
        ("runs", lambda: check_runs(w, threads, progress)),
        ("tuples", lambda: check_selection(w)),
        ("sieve", lambda: check_sieve(w)),
        ("mk", lambda: check_mk(w)),
        ("digits", lambda: check_digits(w)),
    ]
    for name, check in checks:
        logger.info("checking %s", name)
        try:
            failures.extend(check())
        except PrimeRunsError as e:
            failures.append("{}: {}: {}".format(name, type(e).__name__, e))
    return failures
