"""Lower and upper bounds on the windowed ratio over a grid of k (Figure 1 style CSV).

    python scripts/figure1_bounds.py --out bounds.csv
"""
import argparse
import csv
import sys

import numpy as np

from prophet_lab.bounds import READINGS, bound_sweep
from prophet_lab.cli import shipped_witness_dir
from prophet_lab.hardsearch import AlphaTable

PAPER = {100: (0.74785, 0.86095), 1000: (None, 0.78592), 10_000: (None, 0.75885)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, nargs="*")
    ap.add_argument("--reading", choices=READINGS, default="threshold")
    ap.add_argument("--out", default="-")
    args = ap.parse_args()
    ks = args.k or sorted({int(k) for k in np.geomspace(10, 10_000, 19).round()} | set(PAPER))
    table = AlphaTable.from_dir(shipped_witness_dir())
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["k", "lower", "clean_upper", "clean_l", "tight_upper", "tight_l", "paper_upper"])
    for r in bound_sweep(ks, table, reading=args.reading):
        w.writerow([r.k, f"{r.lower:.6f}" if r.lower else "", f"{r.clean_bound:.6f}", r.clean_l,
                    f"{r.tight_bound:.6f}", r.tight_l, PAPER.get(r.k, (None, ""))[1]])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
