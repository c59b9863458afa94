"""Random-pattern scan benchmark plus the statistics used to report it.

A run issues ``users * scans_per_user`` scans.  Each simulated user is a
thread with its own PCG64 stream derived from ``(seed, user index)``, so the
pattern column is replayable no matter how threads interleave.  Only the
scan call is timed; ``reply_ms`` is that time floored to whole milliseconds
and clamped to at least 1.

Scans that raise are kept as error rows (``outcome == -1``) and left out of
every statistic.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence as Seq, TextIO

from .errors import DegenerateField, EmptyInput, MalformedRow, SfxTabletError
from .genome import DNA, Alphabet, make_rng, random_pattern
from .tablets import ScanResult, TabletStore, clamp_ms, scan

CSV_HEADER = ("id", "user", "pattern", "reply_ms", "reply_nanos", "outcome", "pattern_length")
NUMERIC_FIELDS = ("reply_ms", "outcome", "pattern_length")
FIELD_LABELS = {"reply_ms": "milliseconds", "outcome": "outcome",
                "pattern_length": "pattern length", "reply_nanos": "nanoseconds"}
ERROR_OUTCOME = -1
SINGLE_USER = "singlethread"


@dataclass
class BenchConfig:
    scans_per_user: int = 10_000
    users: int = 1
    pattern_len_range: tuple[int, int] = (1, 100)
    seed: int = 0
    clamp_unit_ms: int = 1
    alphabet: Alphabet = DNA

    def __post_init__(self):
        if self.scans_per_user < 1:
            raise ValueError(f"scans_per_user must be >= 1, got {self.scans_per_user}")
        if self.users < 1:
            raise ValueError(f"users must be >= 1, got {self.users}")
        if self.clamp_unit_ms != 1:
            raise ValueError("only a 1 ms clamp unit is supported")

    def user_label(self, index: int) -> str:
        return SINGLE_USER if self.users == 1 else f"user-{index:02d}"


@dataclass(frozen=True)
class BenchRecord:
    id: int
    user: str
    pattern: str
    reply_ms: int
    reply_nanos: int
    outcome: int
    pattern_length: int

    @property
    def is_error(self) -> bool:
        return self.outcome == ERROR_OUTCOME


def pattern_stream(config: BenchConfig, user: int):
    """The patterns user ``user`` issues, in order."""
    rng = make_rng(config.seed, user)
    lo, hi = config.pattern_len_range
    for _ in range(config.scans_per_user):
        yield random_pattern(rng, lo, hi, config.alphabet)


def _worker(store, config: BenchConfig, user: int,
            scan_fn: Callable[[TabletStore, object], ScanResult]) -> list[BenchRecord]:
    label = config.user_label(user)
    base = user * config.scans_per_user
    out = []
    for i, pattern in enumerate(pattern_stream(config, user)):
        try:
            result = scan_fn(store, pattern)
        except SfxTabletError:
            out.append(BenchRecord(base + i + 1, label, pattern.text, 1, 0,
                                   ERROR_OUTCOME, len(pattern)))
            continue
        out.append(BenchRecord(base + i + 1, label, pattern.text,
                               clamp_ms(result.reply_nanos), result.reply_nanos,
                               result.outcome, len(pattern)))
    return out


def run_bench(store: TabletStore, config: BenchConfig,
              scan_fn: Callable[[TabletStore, object], ScanResult] = scan) -> list[BenchRecord]:
    """Run the benchmark; records come back sorted by (user, id)."""
    if config.users == 1:
        records = _worker(store, config, 0, scan_fn)
    else:
        with ThreadPoolExecutor(max_workers=config.users) as pool:
            futures = [pool.submit(_worker, store, config, u, scan_fn)
                       for u in range(config.users)]
            records = [r for f in futures for r in f.result()]
    records.sort(key=lambda r: (r.user, r.id))
    return records


def error_count(records: Iterable[BenchRecord]) -> int:
    return sum(1 for r in records if r.is_error)


# -- statistics ------------------------------------------------------------------

@dataclass(frozen=True)
class StatsSummary:
    field: str
    n: int
    mean: float
    stddev: float
    min: float
    max: float


def _values(records, name: str) -> list[float]:
    out = []
    for r in records:
        if isinstance(r, BenchRecord):
            if r.is_error:
                continue
            out.append(getattr(r, name))
        else:
            out.append(r)
    return out


def describe(values: Iterable[float], name: str = "value") -> StatsSummary:
    """Welford's single-pass mean and sample variance.

    A single observation has stddev 0 by convention.
    """
    n = 0
    mean = 0.0
    m2 = 0.0
    lo = hi = None
    for x in values:
        n += 1
        delta = x - mean
        mean += delta / n
        m2 += delta * (x - mean)
        lo = x if lo is None or x < lo else lo
        hi = x if hi is None or x > hi else hi
    if n == 0:
        raise EmptyInput(name)
    stddev = math.sqrt(m2 / (n - 1)) if n > 1 else 0.0
    # rounding can push the running mean a hair outside [min, max]
    mean = min(max(mean, lo), hi)
    return StatsSummary(name, n, mean, stddev, lo, hi)


def summarize(records, field: str) -> StatsSummary:
    """Summary of one numeric field; accepts records or plain numbers."""
    return describe(_values(records, field), field)


@dataclass(frozen=True)
class CorrelationMatrix:
    fields: tuple[str, ...]
    # None marks an undefined coefficient (a constant field is involved)
    entries: tuple[tuple[Optional[float], ...], ...]
    degenerate: tuple[str, ...] = ()
    n: int = 0

    def entry(self, a: str, b: str) -> Optional[float]:
        return self.entries[self.fields.index(a)][self.fields.index(b)]


def pearson(xs: Seq[float], ys: Seq[float]) -> Optional[float]:
    """Pearson r from streaming co-moments; None when either side is constant."""
    if len(xs) != len(ys):
        raise ValueError("vectors differ in length")
    n = 0
    mx = my = 0.0
    sxx = syy = sxy = 0.0
    for x, y in zip(xs, ys):
        n += 1
        dx = x - mx
        dy = y - my
        mx += dx / n
        my += dy / n
        sxx += dx * (x - mx)
        syy += dy * (y - my)
        sxy += dx * (y - my)
    if n < 2 or sxx <= 0.0 or syy <= 0.0:
        return None
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _is_constant(values: Seq[float]) -> bool:
    return not values or all(v == values[0] for v in values)


def correlate(records, fields: Seq[str] = NUMERIC_FIELDS, strict: bool = False) -> CorrelationMatrix:
    """Pairwise Pearson coefficients over ``fields``.

    Constant fields get undefined (None) entries, diagonal included; with
    ``strict`` a constant field raises :class:`DegenerateField` instead.
    """
    if isinstance(records, dict):
        columns = {f: list(records[f]) for f in fields}
    else:
        records = list(records)
        columns = {f: _values(records, f) for f in fields}
    n = len(columns[fields[0]])
    if n == 0:
        raise EmptyInput("records")
    degenerate = tuple(f for f in fields if _is_constant(columns[f]))
    if strict and degenerate:
        raise DegenerateField(degenerate[0])
    k = len(fields)
    grid: list[list[Optional[float]]] = [[None] * k for _ in range(k)]
    for i, a in enumerate(fields):
        if a in degenerate:
            continue
        grid[i][i] = 1.0
        for j in range(i + 1, k):
            b = fields[j]
            if b not in degenerate:
                grid[i][j] = grid[j][i] = pearson(columns[a], columns[b])
    rows = [tuple(r) for r in grid]
    return CorrelationMatrix(tuple(fields), tuple(rows), degenerate, n)


def histogram(records, field: str = "reply_ms", bucket_width: int = 1) -> list[tuple[int, int]]:
    """Counts per bucket from the minimum to the maximum, empty buckets included."""
    if bucket_width < 1:
        raise ValueError(f"bucket_width must be >= 1, got {bucket_width}")
    values = _values(records, field)
    if not values:
        raise EmptyInput(field)
    lo, hi = min(values), max(values)
    counts = [0] * (int((hi - lo) // bucket_width) + 1)
    for v in values:
        counts[int((v - lo) // bucket_width)] += 1
    return [(lo + i * bucket_width, c) for i, c in enumerate(counts)]


# -- CSV -------------------------------------------------------------------------

def write_csv(records: Iterable[BenchRecord], sink: TextIO) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow((r.id, r.user, r.pattern, r.reply_ms, r.reply_nanos,
                         r.outcome, r.pattern_length))


def _int(value: str, line_no: int, name: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise MalformedRow(line_no, f"{name} is not an integer: {value!r}") from None


def read_csv(source: TextIO) -> list[BenchRecord]:
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None:
        return []
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise MalformedRow(1, "unexpected header")
    out = []
    for row in reader:
        line_no = reader.line_num
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise MalformedRow(line_no, f"expected {len(CSV_HEADER)} fields, got {len(row)}")
        rid, user, pattern, ms, ns, outcome, plen = row
        rec = BenchRecord(_int(rid, line_no, "id"), user, pattern,
                          _int(ms, line_no, "reply_ms"), _int(ns, line_no, "reply_nanos"),
                          _int(outcome, line_no, "outcome"), _int(plen, line_no, "pattern_length"))
        if not user:
            raise MalformedRow(line_no, "empty user")
        if rec.outcome not in (0, 1, ERROR_OUTCOME):
            raise MalformedRow(line_no, f"outcome {rec.outcome} not in {{0, 1}}")
        if rec.pattern_length != len(pattern):
            raise MalformedRow(line_no, "pattern_length does not match pattern")
        if rec.reply_ms < 1 or rec.reply_nanos < 0:
            raise MalformedRow(line_no, "reply time out of range")
        out.append(rec)
    return out


def records_to_csv(records: Iterable[BenchRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


# -- report tables ---------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, float):
        return f"{v:.3f}"
    return f"{v:,}"


def format_summary_table(summaries: Seq[StatsSummary]) -> str:
    head = ("Statistic", "N", "Mean", "St. Dev.", "Min", "Max")
    rows = [(FIELD_LABELS.get(s.field, s.field), _fmt(s.n), _fmt(float(s.mean)),
             _fmt(float(s.stddev)), _fmt(s.min), _fmt(s.max)) for s in summaries]
    return _align(head, rows)


def format_correlation_table(matrix: CorrelationMatrix) -> str:
    labels = [FIELD_LABELS.get(f, f) for f in matrix.fields]
    rows = []
    for label, entries in zip(labels, matrix.entries):
        rows.append((label, *("NA" if e is None else f"{e:.4g}" for e in entries)))
    return _align(("", *labels), rows)


def _align(head, rows) -> str:
    widths = [max(len(str(c)) for c in col) for col in zip(head, *rows)]
    lines = ["  ".join(str(c).ljust(w) if i == 0 else str(c).rjust(w)
                       for i, (c, w) in enumerate(zip(line, widths))).rstrip()
             for line in (head, *rows)]
    rule = "-" * len(lines[0])
    return "\n".join([lines[0], rule, *lines[1:]])


def summary_csv(summaries: Seq[StatsSummary]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("field", "n", "mean", "stddev", "min", "max"))
    for s in summaries:
        w.writerow((s.field, s.n, repr(float(s.mean)), repr(float(s.stddev)), s.min, s.max))
    return buf.getvalue()


def correlation_csv(matrix: CorrelationMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("field", *matrix.fields))
    for f, entries in zip(matrix.fields, matrix.entries):
        w.writerow((f, *("NA" if e is None else repr(e) for e in entries)))
    return buf.getvalue()


def histogram_csv(buckets: Seq[tuple[int, int]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("bucket", "count"))
    w.writerows(buckets)
    return buf.getvalue()
