#!/usr/bin/env python3
"""Recompute the monthly narrative index from a run's chains.jsonl and
compare it with series.csv.

Every value is evaluated directly: for each series row, sum
similarity / (1 + a * exp(b * d)) over all links filed in that month whose
source topics contain src and destination topics contain dst.
"""

import argparse
import csv
import json
import math
import pathlib
import sys


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", type=pathlib.Path, help="pipeline output directory")
    parser.add_argument("--a", type=float, default=0.05)
    parser.add_argument("--half-life-days", type=int, default=1825)
    parser.add_argument("--tolerance", type=float, default=1e-9)
    args = parser.parse_args()

    b = math.log((1 + 2 * args.a) / args.a) / args.half_life_days
    with open(args.out / "chains.jsonl", encoding="utf-8") as f:
        links = [json.loads(line) for line in f if line.strip()]

    worst, rows, nonzero = 0.0, 0, 0
    with open(args.out / "series.csv", encoding="utf-8", newline="") as f:
        for row in csv.DictReader(f):
            month = f"{int(row['year']):04d}-{int(row['month']):02d}"
            want = 0.0
            for link in links:
                if not link["current_date"].startswith(month):
                    continue
                if row["src_topic"] in link["src_topics"] and row["dst_topic"] in link["dst_topics"]:
                    want += link["similarity"] / (1 + args.a * math.exp(b * link["d"]))
            worst = max(worst, abs(float(row["value"]) - want))
            rows += 1
            nonzero += want != 0.0

    ok = rows > 0 and worst <= args.tolerance
    print(f"{'PASS' if ok else 'FAIL'}: {len(links)} links, {rows} values ({nonzero} nonzero), max |diff| {worst:.3g}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
