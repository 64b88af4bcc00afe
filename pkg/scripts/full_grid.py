"""Full 240-point tf-idf/C grid search on a synthetic corpus, printing the top rows.

    python scripts/full_grid.py [--authors 40] [--signal 0.05] [--jobs 4]
"""

import argparse
import math

from authorprof.corpus import generate_synthetic
from authorprof.experiments import GRID_KEYS, GridSpec, grid_search

CLASSES = [("canada", ["maple", "hockey"]), ("ireland", ["craic", "grand"])]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--authors", type=int, default=40)
    ap.add_argument("--signal", type=float, default=0.05)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--top", type=int, default=10)
    args = ap.parse_args()
    corpus = generate_synthetic(args.authors, 4, CLASSES, 300, args.signal, seed=0)
    best, report = grid_search(corpus, "variety", GridSpec(), k=5, seed=0, jobs=args.jobs)
    print(f"{len(report.rows)} points, {len(report.scored_rows)} scored")
    rows = sorted(report.scored_rows, key=lambda r: -r["mean"])
    print("\t".join(GRID_KEYS) + "\tmean")
    for r in rows[: args.top]:
        print("\t".join(str(r[k]) for k in GRID_KEYS) + f"\t{r['mean']:.3f}")
    failed = [r for r in report.rows if math.isnan(r["mean"])]
    print(f"best: {best}; failed points: {len(failed)}")


if __name__ == "__main__":
    main()
