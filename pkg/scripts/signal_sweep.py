"""5-fold CV accuracy of the default configuration as the planted-signal rate grows.

    python scripts/signal_sweep.py [--authors 200] [--rates 0 0.01 0.02 0.05 0.1 0.3]
"""

import argparse
import time

from authorprof.corpus import generate_synthetic
from authorprof.experiments import cross_validate

CLASSES = [("canada", ["maple", "hockey", "toque", "loonie"]), ("ireland", ["craic", "grand", "feck", "eejit"])]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--authors", type=int, default=200)
    ap.add_argument("--docs", type=int, default=10)
    ap.add_argument("--rates", type=float, nargs="+", default=[0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.3])
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    print("signal_rate\tmean_acc\tfolds\tseconds")
    for rate in args.rates:
        t0 = time.perf_counter()
        corpus = generate_synthetic(args.authors, args.docs, CLASSES, 500, rate, args.seed)
        rep = cross_validate(corpus, "variety", k=5, seed=0)
        folds = ",".join(f"{a:.3f}" for a in rep.fold_accuracies)
        print(f"{rate}\t{rep.mean:.3f}\t{folds}\t{time.perf_counter() - t0:.1f}")


if __name__ == "__main__":
    main()
