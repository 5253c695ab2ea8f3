import dataclasses
import io
import json
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from primeruns import arith, digits
from primeruns.errors import InfeasibleError, InternalConsistencyError, NotApplicableError, \
    UsageError


def test_law_parameters():
    p = digits.DigitLawParams(10)
    assert (p.mu, p.sigma2) == (Fraction(9, 2), Fraction(33, 4))
    assert float(p.digits(1000)) == pytest.approx(3)
    assert float(p.mean_sum(100)) == pytest.approx(9)
    assert float(p.variance(100)) == pytest.approx(16.5)
    with pytest.raises(UsageError):
        digits.DigitLawParams(1)


def test_dmr_prediction_binary():
    # mean digit sum 5 at x = 2^10, so the Gaussian factor is 1; pi(1024) = 172
    expected = 172 / math.sqrt(2 * math.pi * 0.25 * 10)
    assert digits.dmr_prediction(2, 1024, 5) == pytest.approx(expected, rel=1e-12)


def test_dmr_prediction_errors():
    with pytest.raises(NotApplicableError) as e:
        digits.dmr_prediction(10, 1000, 9)
    assert e.value.exit_status == 2
    with pytest.raises(UsageError):
        digits.dmr_prediction(10, 99, 10)


def test_histogram_small(monkeypatch):
    table = digits.digit_histogram(10, 10**4)
    assert sum(obs for obs, _, _ in table.values()) == 1229
    for l, (obs, pred, ratio) in table.items():
        if l % 3 == 0:
            # only p = 3 has a digit sum divisible by 3
            assert obs == (1 if l == 3 else 0)
            assert pred is None and ratio is None
        else:
            assert pred > 0
    monkeypatch.setattr(digits, "BLOCK_SIZE", 1000)
    assert digits.digit_histogram(10, 10**4, threads=2) == table


@pytest.mark.slow
def test_histogram_matches_law():
    x = 10**7
    table = digits.digit_histogram(10, x)
    for l in digits.central_sums(10, x):
        assert 0.8 <= table[l][2] <= 1.25
    # s(p) = p mod 3, so only p = 3 has a digit sum divisible by 3
    assert all(obs == (l == 3) for l, (obs, _, _) in table.items() if l % 3 == 0)


def test_histogram_csv():
    fh = io.StringIO()
    digits.write_histogram_csv({3: (1, None, None), 10: (5, 4.0, 1.25)}, fh)
    assert fh.getvalue() == "l,observed,predicted,ratio\n3,1,,\n10,5,4.000000,1.250000\n"


@pytest.mark.parametrize("g", [2, 10, 16])
def test_digit_sum_congruence(g):
    n = np.arange(1, 10**5 + 1, dtype=np.int64)
    s = arith.digit_sums(n, g)
    assert ((s - n) % (g - 1) == 0).all()
    assert (s >= 1).all() and (s <= n).all()


def test_central_sums():
    assert digits.central_sums(10, 10**6) == [20, 22, 23, 25, 26, 28, 29, 31, 32, 34]


def test_primes_with_digit_sum():
    assert digits.primes_with_digit_sum(10, 2, 100, 10) == [19, 37, 73]
    assert digits.primes_with_digit_sum(10, 100, 200, 13) == [139, 157, 193]
    assert digits.primes_with_digit_sum(10, 100, 200, 13, count=1) == [139]
    assert digits.primes_with_digit_sum(10, 2, 100, 9) == []
    with pytest.raises(UsageError):
        digits.primes_with_digit_sum(10, 100, 100, 13)


def test_nearest_coprime():
    assert digits.nearest_coprime(10, 10.5) == 10
    assert digits.nearest_coprime(10, 9.2) == 10
    assert digits.nearest_coprime(10, 8.6) == 8
    assert digits.nearest_coprime(2, 6.5) == 6
    assert digits.coprime_sums_above(10, 9, 3) == [10, 11, 13]


def test_k_required():
    assert digits.k_required(2) == "1318815735"
    assert len(digits.k_required(1)) == 6
    assert digits.k_required(250) == "e^2005"


def test_constant_plan():
    plan = digits.constant_run_plan(10, 2, 5, 150)
    assert plan.primes == (19, 37, 73, 109, 127)
    assert plan.target_sums == (10,) * 5
    assert plan.A == 1000
    assert plan.guarantee == "desk_scale_demo"
    assert plan.k_required == "1318815735"
    assert digits.plan_violations(plan) == []


def test_constant_plan_infeasible():
    with pytest.raises(InfeasibleError) as e:
        digits.constant_run_plan(10, 2, 5, 30)
    assert e.value.details == {"found": 0, "required": 5, "l": 7}
    assert e.value.exit_status == 3
    with pytest.raises(InfeasibleError):
        digits.constant_run_plan(10, 2, 20, 15)


@pytest.mark.parametrize("mode, primes, sums", [
    ("increasing", (109, 227, 409), (10, 11, 13)),
    ("decreasing", (139, 227, 433), (13, 11, 10)),
])
def test_monotone_plan(mode, primes, sums):
    plan = digits.monotone_run_plan(10, 3, 3, 100, mode)
    assert (plan.primes, plan.target_sums, plan.mode) == (primes, sums, mode)
    assert plan.A == 1000


def test_bad_requests():
    with pytest.raises(UsageError):
        digits.monotone_run_plan(10, 3, 3, 100, "sideways")
    with pytest.raises(UsageError):
        digits.monotone_run_plan(10, 3, 3, 10, "increasing")
    with pytest.raises(UsageError):
        digits.constant_run_plan(10, 0, 5, 150)
    with pytest.raises(UsageError):
        digits.constant_run_plan(10, 2, 1, 150)
    with pytest.raises(UsageError):
        digits.constant_run_plan(1, 2, 5, 150)


def test_candidate_sums_follow_plan():
    plan = digits.constant_run_plan(10, 2, 5, 150)
    # s(42) = 6
    assert digits.candidate_sums(plan, 42) == [16] * 5
    plan = digits.monotone_run_plan(10, 3, 3, 100, "increasing")
    rng = random.Random(3)
    for _ in range(200):
        s = digits.candidate_sums(plan, rng.randrange(10**12))
        assert s[0] < s[1] < s[2]
    with pytest.raises(UsageError):
        digits.candidate_sums(plan, -1)


def test_tampered_plan():
    plan = digits.constant_run_plan(10, 2, 5, 150)
    with pytest.raises(InternalConsistencyError):
        digits.verify_plan(dataclasses.replace(plan, A=100))
    with pytest.raises(InternalConsistencyError):
        digits.verify_plan(dataclasses.replace(plan, primes=(19, 37, 73, 109, 128)))
    bad = digits.plan_violations(dataclasses.replace(plan, mode="increasing"))
    assert bad == ["sums [10, 10, 10, 10, 10] are not increasing"]


@pytest.mark.parametrize("g", [2, 10, 16])
def test_concat_identity(g):
    rng = random.Random(g)
    for _ in range(10**4):
        Npow = rng.randrange(1, 12)
        n = rng.randrange(10**9)
        b = rng.randrange(g**Npow)
        assert digits.concat_identity_check(g, Npow, n, b)
    with pytest.raises(UsageError):
        digits.concat_identity_check(g, 2, 5, g**2)


def test_write_plan():
    fh = io.StringIO()
    digits.write_plan(digits.constant_run_plan(10, 2, 5, 150), fh)
    d = json.loads(fh.getvalue())
    assert d["A"] == "1000" and d["primes"] == [19, 37, 73, 109, 127]
    assert arith.digit_sum(1000 * 42 + 523, 10) == 16
