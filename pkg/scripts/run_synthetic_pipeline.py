#!/usr/bin/env python3
"""Run the full pipeline on the bundled synthetic corpus and print a digest.

Writes the output tree to ./out-synthetic (override with --out) and shows,
per source, the fortnight topic rows and the strongest cross-source
correlations, mirroring what the trend analysis produces on real feeds.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from topicwalk.cli import main as cli_main
from topicwalk.textprep import default_data_path


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out-synthetic")
    args = parser.parse_args()

    rc = cli_main(
        [
            "run",
            "--input", str(default_data_path("synthetic_corpus.jsonl")),
            "--labels", str(default_data_path("synthetic_labels.csv")),
            "--out", args.out,
        ]
    )
    if rc != 0:
        return rc

    out = Path(args.out)
    with (out / "topics.csv").open(encoding="utf-8", newline="") as fh:
        topics = list(csv.DictReader(fh))
    print(f"\n{len(topics)} labeled communities; first fortnight per source:")
    for row in topics:
        if row["timeframe"] == "Fortnight 1":
            print(
                f"  {row['source']:14s} {row['code']:24s} "
                f"{row['cluster_pct']:>6s}%  {row['vertex']:>4s} vertices  {row['edge']:>4s} edges"
            )

    with (out / "correlations.csv").open(encoding="utf-8", newline="") as fh:
        correlations = list(csv.DictReader(fh))
    print("\nstrongest cross-source topic correlations:")
    for row in correlations[:6]:
        rho = row["rho"] if row["rho"] else "null"
        print(f"  {row['code']:24s} rho={rho}")
    print(f"\nfull output tree in {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
