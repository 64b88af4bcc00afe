"""Cross-validated accuracies on the PAN 2017 author-profiling training corpus.

Expects ``ROOT/<lang>/truth.txt`` plus author XML for ar, en, es, pt. Prints
gender, variety and joint-label 5-fold CV accuracies per language next to the
published numbers.

    python scripts/reproduce_pan17.py ROOT [--langs en pt]
"""

import argparse
import time

from authorprof.corpus import load_corpus
from authorprof.experiments import cross_validate, run_joint

PUBLISHED = {  # (variety, gender, joint-label model)
    "ar": (0.831, 0.800, 0.630),
    "en": (0.898, 0.823, 0.645),
    "es": (0.962, 0.832, 0.686),
    "pt": (0.981, 0.845, 0.792),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("root")
    ap.add_argument("--langs", nargs="+", default=sorted(PUBLISHED))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("lang\ttask\tacc\tpublished\tseconds")
    for lang in args.langs:
        corpus = load_corpus(f"{args.root}/{lang}", lang)
        variety, gender, joint = PUBLISHED[lang]
        for task, target in (("variety", variety), ("gender", gender), ("joint", joint)):
            t0 = time.perf_counter()
            if task == "joint":
                acc = run_joint(corpus, k=5, seed=args.seed).mean
            else:
                acc = cross_validate(corpus, task, k=5, seed=args.seed).mean
            print(f"{lang}\t{task}\t{acc:.3f}\t{target:.3f}\t{time.perf_counter() - t0:.0f}", flush=True)


if __name__ == "__main__":
    main()
