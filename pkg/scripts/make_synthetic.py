"""Write a planted-signal corpus in PAN layout (``<out>/en/truth.txt`` + XML).

    python scripts/make_synthetic.py --out data/synth --authors 200 --signal 0.3
"""

import argparse

from authorprof.corpus import dump_corpus, generate_synthetic

CLASSES = [
    ("female:::canada", ["maple", "kitten", "@mom"]),
    ("male:::canada", ["maple", "league", "@nhl"]),
    ("female:::ireland", ["craic", "kitten", "@mom"]),
    ("male:::ireland", ["craic", "league", "@gaa"]),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", required=True)
    ap.add_argument("--authors", type=int, default=200)
    ap.add_argument("--docs", type=int, default=10)
    ap.add_argument("--vocab", type=int, default=500)
    ap.add_argument("--signal", type=float, default=0.3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    corpus = generate_synthetic(
        args.authors, args.docs, CLASSES, args.vocab, args.signal, args.seed, label_field="joint"
    )
    dump_corpus(corpus, f"{args.out}/en")
    print(f"wrote {len(corpus)} authors to {args.out}/en")


if __name__ == "__main__":
    main()
