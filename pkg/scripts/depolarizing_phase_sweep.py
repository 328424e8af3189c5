"""Classify the qubit depolarizing family over a fine p-grid and write a CSV.

The positive region is |p| <= 1 and the completely positive region is
-1/3 <= p <= 1; the table makes both thresholds visible.
"""

import argparse
import sys

import numpy as np

from contractivity.certifier import CertConfig
from contractivity.cli import rows_to_csv, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=float, default=-1.5)
    ap.add_argument("--hi", type=float, default=1.5)
    ap.add_argument("--n", type=int, default=31)
    ap.add_argument("--f", default="sld")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out")
    args = ap.parse_args()
    grid = np.round(np.linspace(args.lo, args.hi, args.n), 10)
    rows = sweep("depolarizing", "p", grid, CertConfig(f=args.f, seed=args.seed, n_samples=300, oracle_samples=1000))
    text = rows_to_csv(rows, "p")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
