import json

import pytest

from primeruns import cli


def run(capsys, *argv):
    status = cli.main(list(argv) + ["--threads", "1"])
    return status, capsys.readouterr().out


def test_runs_csv(capsys):
    status, out = run(capsys, "runs", "find", "--function", "tau_shift", "--mode", "increasing",
                      "--min-len", "4", "--bound", "100")
    assert status == 0
    lines = out.splitlines()
    assert lines[0].startswith("start_index,")
    assert "2 3 5 7" in lines[1]


def test_runs_first_json(capsys):
    status, out = run(capsys, "runs", "first", "--function", "phi_shift", "--mode", "increasing",
                      "--min-len", "3", "--format", "json")
    assert status == 0
    assert json.loads(out)[0]["primes"][:3] == [19, 23, 29]


def test_runs_stats(capsys):
    status, out = run(capsys, "runs", "stats", "--function", "tau_shift", "--mode", "increasing",
                      "--bound", "100")
    assert status == 0
    assert out.splitlines()[0] == "length,count"


def test_output_is_reproducible(capsys, tmp_path):
    argv = ["runs", "--function", "omega_shift", "--mode", "constant", "--bound", "3000"]
    _, first = run(capsys, *argv)
    _, second = run(capsys, *argv)
    assert first == second
    path = tmp_path / "runs.csv"
    status, out = run(capsys, *argv, "--output", str(path))
    assert status == 0 and out == ""
    assert path.read_text() == first


def test_mk_bound(capsys):
    status, out = run(capsys, "mk", "bound", "--k", "1", "--degree", "2")
    assert status == 0
    assert out.splitlines() == ["k,degree,bound,certified", "1,2,1.000000000000,1"]


def test_mk_table_json(capsys):
    status, out = run(capsys, "mk", "table", "--ks", "2", "--degrees", "0,1", "--format", "json")
    assert status == 0
    rows = json.loads(out)
    assert [r["degree"] for r in rows] == [0, 1]
    assert rows[0]["bound_exact"] == "4/3"
    assert rows[1]["bound"] == pytest.approx(1.38309518948453)


def test_digits_plan(capsys):
    status, out = run(capsys, "digits", "plan")
    assert status == 0
    plan = json.loads(out)
    assert plan["A"] == "1000"
    assert plan["primes"] == [19, 37, 73, 109, 127]


def test_digits_find_and_concat(capsys):
    status, out = run(capsys, "digits", "find", "--lo", "100", "--hi", "200", "--l", "13")
    assert status == 0 and json.loads(out)["primes"] == [139, 157, 193]
    status, out = run(capsys, "digits", "concat")
    assert status == 0 and json.loads(out)["holds"] is True


def test_infeasible_exit(capsys):
    status, out = run(capsys, "digits", "plan", "--x", "30")
    assert status == 3
    report = json.loads(out)
    assert report["details"] == {"found": 0, "required": 5, "l": 7}


def test_usage_exits(capsys):
    # find without --bound
    status, _ = run(capsys, "runs", "--function", "tau_shift", "--mode", "increasing")
    assert status == 2
    status, _ = run(capsys, "runs", "--function", "lambda_shift", "--mode", "increasing",
                    "--bound", "100")
    assert status == 2
    status, _ = run(capsys, "sieve", "--theta", "1/3")
    assert status == 2
    status, _ = run(capsys, "sieve", "--theta", "one fifth")
    assert status == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["runs", "--mode", "increasing"])
    assert e.value.code == 2
    assert cli.main(["runs", "--threads", "0", "--function", "tau_shift", "--mode",
                     "increasing", "--bound", "100"]) == 2


def test_help(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["--help"])
    assert e.value.code == 0
    out = capsys.readouterr().out
    for command in ("runs", "tuple", "sieve", "mk", "digits", "selftest"):
        assert command in out


def test_tuple_commands(capsys):
    status, out = run(capsys, "tuple", "check", "--tuple", "0,2,4")
    assert status == 0
    report = json.loads(out)
    assert report["admissible"] is False and report["covering_prime"] == 3
    status, out = run(capsys, "tuple", "select", "--tuple", "0", "--primes", "2,3,5")
    assert status == 0
    assert json.loads(out)["nu"] == "17"


def greedy_primes(report, i):
    return sorted(a["p"] for a in report["assignments"]
                  if a["provenance"] == "GreedySet({})".format(i))


def test_tuple_select_targets(capsys):
    status, out = run(capsys, "tuple", "select", "--k", "2", "--z1", "5", "--z2", "60",
                      "--z3", "200", "--base", "0.8", "--spacing", "0.1", "--width", "0.05")
    assert status == 0
    report = json.loads(out)
    assert report["tuple"] == [0, 24]
    assert greedy_primes(report, 1) == [7, 11]
    assert greedy_primes(report, 2) == [13, 17, 19, 29, 31, 37, 41]
    # the default targets cannot be met with these cutoffs
    status, out = run(capsys, "tuple", "select", "--k", "2", "--z1", "5", "--z2", "60",
                      "--z3", "200")
    assert status == 3


def test_tuple_select_from_config(capsys, tmp_path):
    path = tmp_path / "plan.cfg"
    path.write_text("N = 10000\nz1 = 5\nz2 = 60\nz3 = 200\n"
                    "variant = omega_count\nsizes = 1, 2\n")
    status, out = run(capsys, "tuple", "select", "--config", str(path))
    assert status == 0
    report = json.loads(out)
    assert [greedy_primes(report, i) for i in (1, 2)] == [[7], [11, 13]]
    # flags override the file
    status, out = run(capsys, "tuple", "select", "--config", str(path), "--sizes", "1,1")
    assert status == 0
    assert [greedy_primes(json.loads(out), i) for i in (1, 2)] == [[7], [11]]
    status, _ = run(capsys, "tuple", "select", "--config", str(path), "--sizes", "1")
    assert status == 2


def test_sieve_identity_from_config(capsys, tmp_path):
    path = tmp_path / "identity.cfg"
    path.write_text("N = 10000\nk = 2\ntheta_num = 1\ntheta_den = 5\n"
                    "tuple = factorial\nW_primes = 2, 3\nF = 1,0=1\n")
    status, out = run(capsys, "sieve", "identity", "--config", str(path))
    assert status == 0
    report = json.loads(out)
    assert report["equal"] is True
    assert report["S1_direct"] == report["S1_rearranged"]
    assert report["coprimality_violations"] == 0


def test_sieve_sums_flags(capsys):
    status, out = run(capsys, "sieve", "sums", "--N", "10000", "--theta", "1/5")
    assert status == 0
    report = json.loads(out)
    assert report["R"] == 6 and report["W"] == "6"
    assert report["predicted"]["ratio_limit"] == "3/20"


def test_sieve_error(capsys):
    status, out = run(capsys, "sieve", "error", "--N", "10", "--q", "3")
    assert status == 0
    assert json.loads(out)["E"] == "1"


def test_sieve_error_from_config(capsys, tmp_path):
    path = tmp_path / "error.cfg"
    path.write_text("N = 10\n")
    status, out = run(capsys, "sieve", "error", "--config", str(path), "--q", "3")
    assert status == 0
    report = json.loads(out)
    assert report["N"] == 10 and report["E"] == "1"
    # --N wins over the file
    status, out = run(capsys, "sieve", "error", "--config", str(path), "--N", "10000", "--q", "3")
    assert status == 0 and json.loads(out)["N"] == 10000
    path.write_text("N = 100\np_bad = 3\n")
    status, out = run(capsys, "sieve", "bv", "--config", str(path), "--d-max", "3")
    assert status == 0
    report = json.loads(out)
    assert report["N"] == 100 and sorted(report["terms"]) == ["1", "2"]


@pytest.mark.slow
def test_selftest(capsys):
    status, _ = run(capsys, "selftest")
    assert status == 0
