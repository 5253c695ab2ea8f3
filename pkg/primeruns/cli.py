# cli.py
#
# Command-line entry point: `primeruns.py <command> [<action>] [flags]`.
#
# Data (CSV or JSON) goes to --output or stdout; logging and progress bars go
# to stderr. Exit status: 0 ok, 1 internal failure, 2 usage, 3 infeasible.

import argparse
import contextlib
import json
import logging
import os
import sys
from fractions import Fraction

from . import digits, mk, runs, selftest, sieve, tuples
from .config import DEFAULT_LIMITS, SIEVE_KEYS, parse_fraction, parse_int, parse_int_list, \
    read_config
from .errors import InfeasibleError, PrimeRunsError, UsageError

logger = logging.getLogger("primeruns")


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json(obj, fh):
    json.dump(_jsonable(obj), fh, indent=1)
    fh.write("\n")


@contextlib.contextmanager
def _output(args):
    if args.output in (None, "-"):
        yield sys.stdout
    else:
        with open(args.output, "w") as fh:
            yield fh


def _threads(args) -> int:
    if args.threads < 1:
        raise UsageError("--threads must be at least 1, got {}".format(args.threads))
    return args.threads


def cmd_runs(args) -> int:
    function = runs.parse_function(args.function)
    if args.action == "stats":
        if args.bound is None:
            raise UsageError("runs stats needs --bound")
        counts = runs.run_statistics(function, args.mode, args.bound, _threads(args), args.progress)
        with _output(args) as fh:
            if args.format == "json":
                write_json(counts, fh)
            else:
                fh.write("length,count\n")
                for length, count in counts.items():
                    fh.write("{},{}\n".format(length, count))
        return 0

    q = runs.RunQuery(function, args.mode, args.min_len, args.bound)
    if args.action == "first":
        records = [runs.first_run(q, _threads(args), DEFAULT_LIMITS, args.checkpoint, args.progress)]
    else:
        records = runs.find_runs(q, _threads(args), not args.windows, args.progress)
    with _output(args) as fh:
        if args.format == "json":
            runs.write_json(records, fh)
        else:
            runs.write_csv(records, fh)
    return 0


def _tuple_from(args) -> tuples.AdmissibleTuple:
    return tuples.parse_tuple(args.tuple, args.k, args.sign)


def cmd_tuple(args) -> int:
    H = _tuple_from(args)
    if args.action == "check":
        result = tuples.is_admissible(H.order)
        report = {"tuple": list(H.order), "admissible": result.admissible,
                  "omitted": result.omitted, "covering_prime": result.covering_prime}
        with _output(args) as fh:
            write_json(report, fh)
        return 0

    if args.primes:
        sel = tuples.basic_selection(H, parse_int_list(args.primes))
    else:
        values = read_config(args.config, SIEVE_KEYS) if args.config else {}
        values = {key: v for key, v in values.items() if key in tuples.PLAN_KEYS}
        values.update(_flag_values(args, tuples.PLAN_KEYS))
        sel = tuples.assemble_selection(tuples.plan_from_values(values, args.N, H.k), H)
    with _output(args) as fh:
        write_json(dict(sel.as_dict(), tuple=list(H.order)), fh)
    return 0


_SIEVE_FLAGS = ("N", "k", "tuple", "sign", "W_primes", "p_bad", "F") + tuples.PLAN_KEYS


def _flag_values(args, keys) -> dict:
    """Flags that were given, as config-file strings."""
    values = {}
    for key in keys:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = str(v)
    return values


def _sieve_values(args) -> dict:
    values = read_config(args.config, SIEVE_KEYS) if args.config else {}
    values.update(_flag_values(args, _SIEVE_FLAGS))
    if args.theta is not None:
        theta = parse_fraction(args.theta)
        values["theta_num"], values["theta_den"] = str(theta.numerator), str(theta.denominator)
    return values


def cmd_sieve(args) -> int:
    values = _sieve_values(args)
    if args.action in ("error", "bv"):
        N = parse_int(values, "N", 10**4)
    if args.action == "error":
        report = {"N": N, "q": args.q, "E": sieve.error_E(N, args.q)}
        with _output(args) as fh:
            write_json(report, fh)
        return 0
    if args.action == "bv":
        total, terms = sieve.bv_scan(N, args.P, args.d_max, parse_int(values, "p_bad", 1))
        with _output(args) as fh:
            write_json({"N": N, "P": args.P, "d_max": args.d_max,
                        "sum": total, "terms": terms}, fh)
        return 0

    cfg = sieve.sieve_config(values)
    lt = sieve.lambda_table(cfg)
    if args.action == "identity":
        space = sieve.weighted_space(cfg, lt, _threads(args), args.progress)
        lhs = space.total
        rhs = sieve.rearranged_S1(cfg, lt)
        report = {"S1_direct": lhs, "S1_rearranged": rhs, "equal": lhs == rhs,
                  "coprimality_violations": len(sieve.coprimality_violations(cfg, lt)),
                  "support_violations": len(sieve.support_violations(cfg, lt)),
                  "tilde_S1": sieve.tilde_S1(cfg, lt)}
        with _output(args) as fh:
            write_json(report, fh)
        return 0 if lhs == rhs else 1

    space = sieve.weighted_space(cfg, lt, _threads(args), args.progress)
    if args.action == "moments":
        report = {"second_moment": sieve.second_moment_ratio(space)}
        for i in range(1, cfg.k + 1):
            report["omega_tilde_{}".format(i)] = sieve.omega_tilde_expectation(space, i)
            if args.B is not None:
                report["exceptional_{}".format(i)] = sieve.exceptional_scan(
                    cfg, i, args.B, args.threshold, table=space.table)
        with _output(args) as fh:
            write_json(report, fh)
        return 0

    report = sieve.sieve_report(cfg, lt, space)
    with _output(args) as fh:
        write_json(report, fh)
    return 0


def cmd_mk(args) -> int:
    if args.action == "table":
        rows = mk.bounds_table(parse_int_list(args.ks), parse_int_list(args.degrees))
    else:
        rows = [mk.mk_lower_bound(args.k, args.degree)]
    with _output(args) as fh:
        if args.format == "json":
            write_json([{"k": r.k, "degree": r.degree, "bound": float(r.bound),
                         "bound_exact": r.bound, "certified": r.certified,
                         "coefficients": {"{},{}".format(*key): c
                                          for key, c in sorted(r.coefficients.items())}}
                        for r in rows], fh)
        else:
            mk.write_bounds_csv(rows, fh)
    return 0


def cmd_digits(args) -> int:
    with _output(args) as fh:
        if args.action == "histogram":
            table = digits.digit_histogram(args.g, args.x, _threads(args))
            if args.format == "json":
                write_json({l: {"observed": o, "predicted": p, "ratio": r}
                            for l, (o, p, r) in table.items()}, fh)
            else:
                digits.write_histogram_csv(table, fh)
        elif args.action == "find":
            found = digits.primes_with_digit_sum(args.g, args.lo, args.hi, args.l, args.count)
            write_json({"g": args.g, "l": args.l, "lo": args.lo, "hi": args.hi, "primes": found}, fh)
        elif args.action == "plan":
            if args.mode == "constant":
                plan = digits.constant_run_plan(args.g, args.K, args.k, args.x)
            else:
                plan = digits.monotone_run_plan(args.g, args.K, args.k, args.x, args.mode)
            digits.write_plan(plan, fh)
        else:
            ok = digits.concat_identity_check(args.g, args.npow, args.n, args.b)
            write_json({"g": args.g, "npow": args.npow, "n": args.n, "b": args.b, "holds": ok}, fh)
    return 0


def cmd_selftest(args) -> int:
    failures = selftest.run(_threads(args), args.progress)
    for f in failures:
        logger.error("selftest: %s", f)
    if failures:
        logger.error("%d selftest checks failed", len(failures))
        return 1
    logger.info("selftest passed")
    return 0


def _plan_arguments(p):
    p.add_argument("--spacing", help="gap between log-ratio targets, e.g. 1/10 (default 4 log 2)")
    p.add_argument("--width", help="width of each log-ratio target (default log 2)")
    p.add_argument("--base", help="offset added to every log-ratio target (default 0)")
    p.add_argument("--sizes", help="omega_count set sizes, e.g. 1,2")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    common.add_argument("--progress", action="store_true", help="progress bars on stderr")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker processes")
    common.add_argument("--config", help="key = value file with sieve parameters")
    common.add_argument("--output", default="-", help="output file, - for stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="primeruns.py", description=(
        "Arithmetic functions at consecutive primes: run searches, residue "
        "selections, sieve weights, M_k bounds and digit-sum plans."),
        formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("runs", parents=[common], formatter_class=fmt,
                       help="runs of f(p - 1) or s_g(p) over consecutive primes")
    p.add_argument("action", nargs="?", choices=("find", "first", "stats"), default="find")
    p.add_argument("--function", required=True,
                   help="phi_shift, sigma_shift, omega_shift, tau_shift or digit_sum(g)")
    p.add_argument("--mode", required=True, choices=tuple(runs.RELATIONS))
    p.add_argument("--min-len", dest="min_len", type=int, default=2)
    p.add_argument("--bound", type=int, help="search primes below this")
    p.add_argument("--windows", action="store_true",
                   help="report every window of length --min-len, not only maximal runs")
    p.add_argument("--checkpoint", help="resume file for `first`")
    p.set_defaults(handler=cmd_runs)

    p = sub.add_parser("tuple", parents=[common], formatter_class=fmt,
                       help="admissibility and residue selections")
    p.add_argument("action", nargs="?", choices=("check", "select"), default="check")
    p.add_argument("--tuple", default="factorial", help="factorial, factorial- or h1,h2,...")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--sign", type=int, default=1, choices=(1, -1))
    p.add_argument("--primes", help="W primes for a basic selection, e.g. 2,3,5")
    p.add_argument("--N", type=int, default=10**6, help="scale for the default cutoffs")
    p.add_argument("--variant", choices=tuples.VARIANTS, help="default phi")
    p.add_argument("--z1", type=int)
    p.add_argument("--z2", type=int)
    p.add_argument("--z3", type=int)
    _plan_arguments(p)
    p.set_defaults(handler=cmd_tuple)

    p = sub.add_parser("sieve", parents=[common], formatter_class=fmt,
                       help="sieve weights, S1/S2 and prime statistics")
    p.add_argument("action", nargs="?", choices=("sums", "identity", "bv", "error", "moments"),
                   default="sums")
    p.add_argument("--N", type=int, help="sieve scale (default 10000 or from --config)")
    p.add_argument("--k", type=int)
    p.add_argument("--theta", help="rational in (0, 1/4), e.g. 1/5")
    p.add_argument("--tuple")
    p.add_argument("--sign", type=int, choices=(1, -1))
    p.add_argument("--W-primes", dest="W_primes")
    p.add_argument("--p-bad", dest="p_bad", type=int)
    p.add_argument("--F", help="basis coefficients, e.g. '1,0=1; 0,1=2'")
    p.add_argument("--z1", type=int)
    p.add_argument("--z2", type=int)
    p.add_argument("--z3", type=int)
    p.add_argument("--variant", choices=tuples.VARIANTS)
    _plan_arguments(p)
    p.add_argument("--q", type=int, default=1, help="modulus for `error`")
    p.add_argument("--P", type=int, default=1, help="base modulus for `bv`")
    p.add_argument("--d-max", dest="d_max", type=int, default=30)
    p.add_argument("--B", type=int, help="squarefull exponent for `moments`")
    p.add_argument("--threshold", type=int)
    p.set_defaults(handler=cmd_sieve)

    p = sub.add_parser("mk", parents=[common], formatter_class=fmt,
                       help="lower bounds for M_k")
    p.add_argument("action", nargs="?", choices=("bound", "table"), default="bound")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--ks", default="1,2,3,4,5,6")
    p.add_argument("--degrees", default="0,1,2,3,4")
    p.set_defaults(handler=cmd_mk)

    p = sub.add_parser("digits", parents=[common], formatter_class=fmt,
                       help="digit sums of primes and digit-sum plans")
    p.add_argument("action", nargs="?", choices=("histogram", "find", "plan", "concat"),
                   default="plan")
    p.add_argument("--g", type=int, default=10)
    p.add_argument("--x", type=int, default=150, help="histogram / search bound")
    p.add_argument("--l", type=int, default=10, help="digit sum for `find`")
    p.add_argument("--lo", type=int, default=2)
    p.add_argument("--hi", type=int, default=100)
    p.add_argument("--count", type=int)
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--mode", choices=digits.MODES, default="constant")
    p.add_argument("--npow", type=int, default=3)
    p.add_argument("--n", type=int, default=42)
    p.add_argument("--b", type=int, default=523)
    p.set_defaults(handler=cmd_digits)

    p = sub.add_parser("selftest", parents=[common], formatter_class=fmt,
                       help="check the witness table and invariants")
    p.set_defaults(handler=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.handler(args)
    except InfeasibleError as e:
        logger.error("%s", e)
        with _output(args) as fh:
            write_json({"error": str(e), "details": e.details}, fh)
        return e.exit_status
    except PrimeRunsError as e:
        logger.error("%s", e)
        return e.exit_status
