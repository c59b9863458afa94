#!/usr/bin/env python3
"""Random-pattern scan experiment: one or many users against an in-memory store.

Writes bench.csv, summary.csv, correlation.csv and hist_reply_ms.csv to
--out-dir and prints the summary and correlation tables.

    python scripts/scan_experiment.py --length 1000000 --users 1 --scans 10000
    python scripts/scan_experiment.py --fasta chr1.fa --users 50 --scans 10000
"""

import argparse
import os
import time

from sfxtablet import bench, genome, tablets


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--fasta", help="subject FASTA (default: synthetic)")
    src.add_argument("--length", type=int, default=200_000, help="synthetic subject length")
    ap.add_argument("--layout", default="suffix_keyed", choices=["suffix_keyed", "position_keyed"])
    ap.add_argument("--truncation", type=int, default=tablets.DEFAULT_TRUNCATION)
    ap.add_argument("--split-threshold", type=int, default=tablets.DEFAULT_SPLIT_THRESHOLD)
    ap.add_argument("--users", type=int, default=1)
    ap.add_argument("--scans", type=int, default=10_000)
    ap.add_argument("--len-min", type=int, default=1)
    ap.add_argument("--len-max", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()

    t0 = time.perf_counter()
    if args.fasta:
        with open(args.fasta) as fh:
            subject = genome.read_fasta(fh)
    else:
        subject = genome.random_sequence(genome.make_rng(args.seed, 999), args.length)
    store = tablets.ingest(subject, args.layout, args.truncation, args.split_threshold)
    print(f"ingest: {store.row_count} rows in {store.tablet_count} tablets, "
          f"{time.perf_counter() - t0:.2f}s")

    config = bench.BenchConfig(args.scans, args.users, (args.len_min, args.len_max), args.seed)
    t0 = time.perf_counter()
    records = bench.run_bench(store, config)
    print(f"bench: {len(records)} scans in {time.perf_counter() - t0:.2f}s\n")

    os.makedirs(args.out_dir, exist_ok=True)
    with open(os.path.join(args.out_dir, "bench.csv"), "w", newline="") as fh:
        bench.write_csv(records, fh)
    usable = [r for r in records if not r.is_error]
    summaries = [bench.summarize(usable, f) for f in bench.NUMERIC_FIELDS]
    summaries.append(bench.summarize(usable, "reply_nanos"))
    matrix = bench.correlate(usable, bench.NUMERIC_FIELDS + ("reply_nanos",))
    for name, text in [("summary.csv", bench.summary_csv(summaries)),
                       ("correlation.csv", bench.correlation_csv(matrix)),
                       ("hist_reply_ms.csv", bench.histogram_csv(bench.histogram(usable, "reply_ms", 1)))]:
        with open(os.path.join(args.out_dir, name), "w", newline="") as fh:
            fh.write(text)

    print(bench.format_summary_table(summaries))
    print()
    print(bench.format_correlation_table(matrix))
    if len(usable) != len(records):
        print(f"\nerror rows excluded: {len(records) - len(usable)}")


if __name__ == "__main__":
    main()
