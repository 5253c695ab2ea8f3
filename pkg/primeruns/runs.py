# runs.py
#
# Exhaustive searches for runs of consecutive primes p_n, p_{n+1}, ... on which
# f(p - 1) (f one of phi, sigma, omega, tau) or the digit sum s_g(p) is strictly
# increasing, strictly decreasing or constant.
#
# "Consecutive" always refers to the full sequence of primes, p_1 = 2, and
# start_index is the 1-based position of the first prime of a run in it.
#
# The primes below a bound are cut into blocks; the blocks are sieved and
# evaluated independently (optionally in worker processes) and then fed in order
# to a RunScanner, which carries the run still open at the end of one block into
# the next. A run is reported once a failing step closes it; the run open at the
# search bound is decided by looking at the first prime past the bound, so every
# reported run is maximal in the full sequence.

import collections
import csv
import dataclasses
import itertools
import json
import logging
import operator
import os
import re
from typing import Callable, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np
from tqdm import tqdm

from . import arith
from .config import DEFAULT_LIMITS, Limits
from .errors import ConfigurationError, RunNotFoundError, UsageError
from .pool import WorkerMap

logger = logging.getLogger("primeruns.runs")

BLOCK_SIZE = 1 << 20
FIRST_STAGE = 10**6

SHIFT_FIELDS = {
    "phi_shift": "phi",
    "sigma_shift": "sigma",
    "omega_shift": "omega",
    "tau_shift": "tau",
}

RELATIONS: Dict[str, Callable] = {
    "increasing": operator.lt,
    "decreasing": operator.gt,
    "constant": operator.eq,
}

CSV_FIELDS = ["start_index", "length", "mode", "function", "primes", "values"]


@dataclasses.dataclass(frozen=True)
class FunctionId:
    kind: str
    base: Optional[int] = None

    def __str__(self):
        if self.kind == "digit_sum":
            return "digit_sum({})".format(self.base)
        return self.kind

    def evaluate(self, primes: np.ndarray) -> np.ndarray:
        primes = np.asarray(primes, dtype=np.int64)
        if primes.size == 0:
            return np.array([], dtype=np.int64)
        if self.kind == "digit_sum":
            return arith.digit_sums(primes, self.base)
        lo = int(primes[0]) - 1
        seg = arith.segment_values(lo, int(primes[-1]))
        return getattr(seg, SHIFT_FIELDS[self.kind])[primes - 1 - lo]

    def value(self, p: int) -> int:
        return int(self.evaluate(np.array([p]))[0])


def parse_function(text: str) -> FunctionId:
    text = text.strip()
    if text in SHIFT_FIELDS:
        return FunctionId(text)
    m = re.fullmatch(r"digit_sum\((\d+)\)", text)
    if m:
        g = int(m.group(1))
        if g < 2:
            raise UsageError("digit base must be at least 2, got {}".format(g))
        return FunctionId("digit_sum", g)
    raise UsageError("unknown function {!r}; expected one of {}, digit_sum(g)".format(
        text, ", ".join(SHIFT_FIELDS)))


@dataclasses.dataclass(frozen=True)
class RunQuery:
    function: FunctionId
    mode: str
    min_length: int = 2
    search_bound: Optional[int] = None

    def __post_init__(self):
        if self.mode not in RELATIONS:
            raise UsageError("unknown mode {!r}; expected one of {}".format(
                self.mode, ", ".join(RELATIONS)))
        if self.min_length < 2:
            raise UsageError("min_length must be at least 2, got {}".format(self.min_length))
        if self.search_bound is not None and self.search_bound < 3:
            raise UsageError("search bound must be at least 3, got {}".format(self.search_bound))


@dataclasses.dataclass(frozen=True)
class RunRecord:
    start_index: int
    primes: Tuple[int, ...]
    values: Tuple[int, ...]
    maximal: bool
    function: str
    mode: str

    @property
    def length(self) -> int:
        return len(self.primes)

    def as_dict(self) -> dict:
        return {
            "start_index": self.start_index,
            "length": self.length,
            "mode": self.mode,
            "function": self.function,
            "primes": list(self.primes),
            "values": list(self.values),
            "maximal": self.maximal,
        }


class RunScanner:
    """Consumes primes in order and emits the runs they close.

    The open run is the longest block of satisfied steps ending at the last
    prime consumed; with no satisfied step it is just that prime.
    """

    def __init__(self, query: RunQuery, maximal_only: bool = True,
                 next_index: int = 1, open_start: int = 1,
                 open_primes: Sequence[int] = (), open_values: Sequence[int] = ()):
        self.query = query
        self.relation = RELATIONS[query.mode]
        self.maximal_only = maximal_only
        self.next_index = next_index
        self.open_start = open_start
        self.open_primes = list(open_primes)
        self.open_values = list(open_values)

    def _records(self, start_index: int, primes: List[int], values: List[int]) -> List[RunRecord]:
        m = self.query.min_length
        name = str(self.query.function)
        if self.maximal_only:
            return [RunRecord(start_index, tuple(primes), tuple(values), True, name, self.query.mode)]
        length = len(primes)
        return [RunRecord(start_index + o, tuple(primes[o:o + m]), tuple(values[o:o + m]),
                          length == m, name, self.query.mode)
                for o in range(length - m + 1)]

    def feed(self, primes: np.ndarray, values: np.ndarray) -> List[RunRecord]:
        if primes.size == 0:
            return []
        if self.open_primes:
            ext_p = np.concatenate(([self.open_primes[-1]], primes)).astype(np.int64)
            ext_v = np.concatenate(([self.open_values[-1]], values)).astype(np.int64)
            offset = 1
        else:
            ext_p, ext_v, offset = primes, values, 0
        base_index = self.next_index - offset

        steps = self.relation(ext_v[:-1], ext_v[1:])
        breaks = np.flatnonzero(~steps)
        starts = np.concatenate(([0], breaks + 1))
        ends = np.concatenate((breaks, [ext_p.size - 1]))
        lengths = ends - starts + 1
        if offset:
            lengths[0] += len(self.open_primes) - 1

        out = []
        # Only the last run is still open; the others were closed by a break.
        for t in np.flatnonzero(lengths[:-1] >= self.query.min_length).tolist():
            s, e = int(starts[t]), int(ends[t])
            ps = ext_p[s:e + 1].tolist()
            vs = ext_v[s:e + 1].tolist()
            start_index = base_index + s
            if t == 0 and offset:
                ps = self.open_primes[:-1] + ps
                vs = self.open_values[:-1] + vs
                start_index = self.open_start
            out.extend(self._records(start_index, ps, vs))

        if breaks.size == 0 and offset:
            self.open_primes.extend(primes.tolist())
            self.open_values.extend(values.tolist())
        else:
            s = int(starts[-1])
            self.open_primes = ext_p[s:].tolist()
            self.open_values = ext_v[s:].tolist()
            self.open_start = base_index + s
        self.next_index += int(primes.size)
        return out

    def close(self, next_prime: int, next_value: int) -> List[RunRecord]:
        """Decides the open run against the first prime past the bound.

        A run that extends past the bound is withheld in maximal mode; in
        windows mode its windows below the bound are still reported, none of
        them maximal.
        """
        if len(self.open_primes) < self.query.min_length:
            return []
        records = self._records(self.open_start, list(self.open_primes), list(self.open_values))
        if self.relation(self.open_values[-1], next_value):
            logger.debug("run open at %d extends past the bound", next_prime)
            if self.maximal_only:
                return []
            return [dataclasses.replace(r, maximal=False) for r in records]
        return records


def _scan_block(function: FunctionId, lo: int, hi: int) -> Tuple[np.ndarray, np.ndarray]:
    primes = arith.primes_in(lo, hi)
    return primes, function.evaluate(primes)


def _scan(scanner: RunScanner, lo: int, hi: int, threads: int = 1,
          progress: bool = False) -> List[RunRecord]:
    if hi <= lo:
        return []
    los = list(range(lo, hi, BLOCK_SIZE))
    his = los[1:] + [hi]
    function = scanner.query.function
    bar = tqdm(total=len(los), desc="scan {}".format(function), unit="block",
               disable=not progress)
    out: List[RunRecord] = []
    with WorkerMap(threads) as mapper:
        # map preserves block order, which the scanner relies on.
        for primes, values in mapper(_scan_block, itertools.repeat(function), los, his):
            out.extend(scanner.feed(primes, values))
            bar.update()
    bar.close()
    logger.debug("scanned [%d, %d): %d records", lo, hi, len(out))
    return out


def find_runs(q: RunQuery, threads: int = 1, maximal_only: bool = True,
              progress: bool = False) -> List[RunRecord]:
    if q.search_bound is None:
        raise UsageError("find_runs needs a search bound")
    scanner = RunScanner(q, maximal_only)
    records = _scan(scanner, 2, q.search_bound, threads, progress)
    p = arith.next_prime(q.search_bound - 1)
    records.extend(scanner.close(p, q.function.value(p)))
    logger.info("%s %s runs of length >= %d below %d: %d", q.function, q.mode,
                q.min_length, q.search_bound, len(records))
    return records


@dataclasses.dataclass(frozen=True)
class Checkpoint:
    function: str
    mode: str
    bound_reached: int
    last_index: int

    def line(self) -> str:
        return "{},{},{},{}".format(self.function, self.mode, self.bound_reached, self.last_index)


def write_checkpoint(path: str, cp: Checkpoint):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(cp.line() + "\n")
    os.replace(tmp, path)


def read_checkpoint(path: str) -> Checkpoint:
    with open(path) as fh:
        text = fh.read().strip()
    # Function ids contain no commas.
    parts = text.split(",")
    if len(parts) != 4:
        raise ConfigurationError("{}: malformed checkpoint {!r}".format(path, text))
    try:
        return Checkpoint(parts[0], parts[1], int(parts[2]), int(parts[3]))
    except ValueError:
        raise ConfigurationError("{}: malformed checkpoint {!r}".format(path, text))


def _rewound_scanner(q: RunQuery, cp: Checkpoint) -> RunScanner:
    """Rebuilds the run open at a checkpoint by scanning backwards from it."""
    relation = RELATIONS[q.mode]
    window = 1 << 12
    while True:
        lo = max(2, cp.bound_reached - window)
        primes = arith.primes_in(lo, cp.bound_reached)
        values = q.function.evaluate(primes)
        fails = np.flatnonzero(~relation(values[:-1], values[1:]))
        if fails.size:
            s = int(fails[-1]) + 1
            break
        if lo == 2:
            s = 0
            break
        window *= 4
    tail_p = primes[s:].tolist()
    tail_v = values[s:].tolist()
    logger.info("resuming at %d (index %d) with an open run of %d primes",
                cp.bound_reached, cp.last_index, len(tail_p))
    return RunScanner(q, True, next_index=cp.last_index + 1,
                      open_start=cp.last_index - len(tail_p) + 1,
                      open_primes=tail_p, open_values=tail_v)


def _stages(start: int, cap: int) -> List[int]:
    bounds = []
    b = FIRST_STAGE
    while b < cap:
        if b > start:
            bounds.append(b)
        b *= 2
    if cap > start:
        bounds.append(cap)
    return bounds


def first_run(q: RunQuery, threads: int = 1, limits: Limits = DEFAULT_LIMITS,
              checkpoint: Optional[str] = None, progress: bool = False) -> RunRecord:
    cap = q.search_bound or limits.search_cap
    bound = 2
    scanner = RunScanner(q)
    if checkpoint and os.path.exists(checkpoint):
        cp = read_checkpoint(checkpoint)
        if (cp.function, cp.mode) != (str(q.function), q.mode):
            raise ConfigurationError("checkpoint {} belongs to {} {}".format(
                checkpoint, cp.function, cp.mode))
        bound = cp.bound_reached
        scanner = _rewound_scanner(q, cp)

    for stage in _stages(bound, cap):
        records = _scan(scanner, bound, stage, threads, progress)
        if records:
            return records[0]
        bound = stage
        logger.info("no %s %s run of length >= %d below %d", q.function, q.mode,
                    q.min_length, bound)
        if checkpoint:
            write_checkpoint(checkpoint, Checkpoint(str(q.function), q.mode, bound,
                                                    scanner.next_index - 1))

    p = arith.next_prime(bound - 1)
    records = scanner.close(p, q.function.value(p))
    if records:
        return records[0]
    raise RunNotFoundError("no {} {} run of length >= {} below {}".format(
        q.function, q.mode, q.min_length, bound), bound_searched=bound)


def run_statistics(function: FunctionId, mode: str, search_bound: int,
                   threads: int = 1, progress: bool = False) -> Dict[int, int]:
    q = RunQuery(function, mode, 2, search_bound)
    counts = collections.Counter(r.length for r in find_runs(q, threads, True, progress))
    return dict(sorted(counts.items()))


def write_csv(records: Iterable[RunRecord], fh: TextIO):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        writer.writerow([r.start_index, r.length, r.mode, r.function,
                         " ".join(map(str, r.primes)), " ".join(map(str, r.values))])


def write_json(records: Iterable[RunRecord], fh: TextIO):
    json.dump([r.as_dict() for r in records], fh, indent=1, sort_keys=True)
    fh.write("\n")
