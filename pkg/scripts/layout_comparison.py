#!/usr/bin/env python3
"""Range scans on suffix-keyed rows vs full filter passes on position-keyed rows.

For each subject length, times the same random patterns against both layouts
and prints mean reply time and rows examined per scan.
"""

import argparse
import statistics

from sfxtablet import genome, tablets


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lengths", type=int, nargs="+", default=[10_000, 100_000, 300_000])
    ap.add_argument("--patterns", type=int, default=200)
    ap.add_argument("--truncation", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'n':>9}  {'layout':<15} {'mean_us':>10} {'rows/scan':>12} {'hit rate':>9}")
    for n in args.lengths:
        subject = genome.random_sequence(genome.make_rng(args.seed, n), n)
        rng = genome.make_rng(args.seed)
        patterns = [genome.random_pattern(rng, 1, min(args.truncation, 100))
                    for _ in range(args.patterns)]
        for layout, fn in [("suffix_keyed", tablets.prefix_scan),
                           ("position_keyed", tablets.filter_scan)]:
            store = tablets.ingest(subject, layout, args.truncation)
            results = [fn(store, p) for p in patterns]
            print(f"{n:>9}  {layout:<15} "
                  f"{statistics.fmean(r.reply_nanos for r in results) / 1e3:>10.1f} "
                  f"{statistics.fmean(r.rows_examined for r in results):>12.1f} "
                  f"{statistics.fmean(r.outcome for r in results):>9.3f}")


if __name__ == "__main__":
    main()
