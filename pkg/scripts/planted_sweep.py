"""Parameter sweep on the planted corpus, printed as a table.

Defaults reproduce the shape of the layout grid: all 16 layouts at
d_t=1.5, k=3, delta=0.4, with the reduced-pairs restriction.
"""

import argparse
import json
import math

from cokplex.classify import Entry, LabeledCorpus, format_table, sweep
from cokplex.molgraph import reduce
from cokplex.similarity import SimilarityCache
from cokplex.synthetic import planted_corpus


def floats(text):
    return [math.inf if t == "inf" else float(t) for t in text.split(",")]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--per-class", type=int, default=20)
    ap.add_argument("--layouts", default=",".join(str(i) for i in range(16)))
    ap.add_argument("--dt-grid", type=floats, default=[1.5])
    ap.add_argument("--k-grid", default="3")
    ap.add_argument("--delta-grid", type=floats, default=[0.4])
    ap.add_argument("--cache", help="JSONL score cache to reuse across runs")
    ap.add_argument("--json", help="also write the rows here")
    args = ap.parse_args()

    mols = planted_corpus(args.seed, args.per_class)
    corpus = LabeledCorpus(Entry(m.name, m.label, reduce(m)) for m in mols)
    rows = sweep(
        corpus,
        [int(x) for x in args.layouts.split(",")],
        args.dt_grid,
        [int(x) for x in args.k_grid.split(",")],
        args.delta_grid,
        cache=SimilarityCache(args.cache),
        reduced_pairs=True,
    )
    print(format_table(rows))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([r.to_dict() for r in rows], fh, indent=1)


if __name__ == "__main__":
    main()
