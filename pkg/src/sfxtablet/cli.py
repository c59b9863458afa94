"""Command line front end: ``ingest``, ``query``, ``bench`` and ``stats``.

Exit codes: ``query`` returns 0 when the pattern occurs and 1 when it does
not; every error exits with 2 and a one-line message on stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import bench, genome, tablets
from .errors import EmptyInput, SfxTabletError

MAX_LISTED_POSITIONS = 100


def _read_input(path: str, alphabet, policy) -> genome.Sequence:
    if path == "-":
        return genome.read_fasta(sys.stdin, alphabet, policy)
    with open(path, encoding="ascii", errors="replace") as fh:
        return genome.read_fasta(fh, alphabet, policy)


def cmd_ingest(args) -> int:
    alphabet = genome.ALPHABETS[args.alphabet]
    start = time.perf_counter()
    seq = _read_input(args.input, alphabet, genome.UnknownSymbolPolicy.parse(args.policy))
    store = tablets.ingest(seq, args.layout, args.truncation, args.split_threshold)
    tablets.persist(store, args.out)
    elapsed = time.perf_counter() - start
    print(f"rows: {store.row_count}")
    print(f"tablets: {store.tablet_count}")
    print(f"layout: {store.layout.label}")
    print(f"elapsed_s: {elapsed:.3f}")
    return 0


def cmd_query(args) -> int:
    store = tablets.load(args.store)
    pattern = genome.normalize_and_validate(args.pattern, genome.DNA, genome.REJECT)
    result = tablets.scan(store, pattern)
    shown = result.positions[:MAX_LISTED_POSITIONS]
    print(f"outcome: {result.outcome}")
    print(f"occurrences: {len(result.positions)}")
    print("positions: " + " ".join(map(str, shown))
          + (" ..." if len(result.positions) > len(shown) else ""))
    print(f"reply_nanos: {result.reply_nanos}")
    print(f"reply_ms: {result.reply_ms_clamped}")
    print(f"rows_examined: {result.rows_examined}")
    print(f"tablets_visited: {result.tablets_visited}")
    return 0 if result.outcome else 1


def _report(records, out=None) -> None:
    out = out or sys.stdout
    usable = [r for r in records if not r.is_error]
    if not usable:
        raise EmptyInput("successful scans")
    summaries = [bench.summarize(usable, f) for f in bench.NUMERIC_FIELDS]
    print(bench.format_summary_table(summaries), file=out)
    print(file=out)
    print(bench.format_correlation_table(bench.correlate(usable)), file=out)
    errors = bench.error_count(records)
    if errors:
        print(f"\nerror rows excluded: {errors}", file=out)


def cmd_bench(args) -> int:
    store = tablets.load(args.store)
    config = bench.BenchConfig(scans_per_user=args.scans, users=args.users,
                               pattern_len_range=(args.len_min, args.len_max), seed=args.seed)
    records = bench.run_bench(store, config)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        bench.write_csv(records, fh)
    print(f"records: {len(records)} -> {args.out}")
    _report(records)
    return 0


def cmd_stats(args) -> int:
    with open(args.csv, encoding="utf-8", newline="") as fh:
        records = bench.read_csv(fh)
    usable = [r for r in records if not r.is_error]
    if not usable:
        raise EmptyInput("records")
    summaries = [bench.summarize(usable, f) for f in bench.NUMERIC_FIELDS]
    matrix = bench.correlate(usable)
    if args.format == "csv":
        print(bench.summary_csv(summaries))
        print(bench.correlation_csv(matrix), end="")
    else:
        _report(records)
    hist_out = args.hist_out or os.path.splitext(args.csv)[0] + f".{args.field}.hist.csv"
    with open(hist_out, "w", encoding="utf-8", newline="") as fh:
        fh.write(bench.histogram_csv(bench.histogram(usable, args.field, args.hist_width)))
    print(f"histogram -> {hist_out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sfxtablet",
                                     description="Suffix rows in a sharded sorted store.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a tablet store from FASTA or raw text")
    p.add_argument("input", help="input path, or '-' for standard input")
    p.add_argument("--alphabet", choices=sorted(genome.ALPHABETS), default="dna")
    p.add_argument("--policy", default="strip",
                   help="unknown symbols: reject, strip or substitute:X (default strip)")
    p.add_argument("--layout", choices=["suffix_keyed", "position_keyed"], default="suffix_keyed")
    p.add_argument("--truncation", type=int, default=tablets.DEFAULT_TRUNCATION)
    p.add_argument("--split-threshold", type=int, default=tablets.DEFAULT_SPLIT_THRESHOLD)
    p.add_argument("--out", required=True, help="store file to write")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("query", help="scan a store for one pattern")
    p.add_argument("store")
    p.add_argument("--pattern", required=True)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="random-pattern scan benchmark")
    p.add_argument("store")
    p.add_argument("--users", type=int, default=1)
    p.add_argument("--scans", type=int, default=10_000, help="scans per user")
    p.add_argument("--len-min", type=int, default=1)
    p.add_argument("--len-max", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="CSV file for the records")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="summary, correlation and histogram of a bench CSV")
    p.add_argument("csv")
    p.add_argument("--field", choices=list(bench.NUMERIC_FIELDS) + ["reply_nanos"],
                   default="reply_ms", help="field for the histogram")
    p.add_argument("--hist-width", type=int, default=1)
    p.add_argument("--hist-out", help="histogram CSV path (default next to the input)")
    p.add_argument("--format", choices=["table", "csv"], default="table")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SfxTabletError, OSError, ValueError, KeyError) as exc:
        print(f"sfxtablet {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
