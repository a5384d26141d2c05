"""Search hard distributions for a grid of k and write them as witness files.

The shipped table under src/prophet_lab/data/witnesses was produced by

    python scripts/build_witnesses.py --budget default
"""
import argparse
import logging
import time
from pathlib import Path

from prophet_lab.hardsearch import build_alpha_table

DEFAULT_KS = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 16, 20, 25, 30, 40, 50, 60, 70, 85, 100, 1000, 10000]
OUT = Path(__file__).resolve().parents[1] / "src" / "prophet_lab" / "data" / "witnesses"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, nargs="*", default=DEFAULT_KS)
    ap.add_argument("--budget", default="default", choices=["quick", "default", "thorough"])
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    t0 = time.time()
    table = build_alpha_table(args.k, args.budget)
    table.save_dir(args.out)
    for e in table:
        print(f"k={e.k:6d}  alpha={e.alpha:.6f}")
    print(f"wrote {len(table)} witnesses to {args.out} in {time.time() - t0:.0f}s")


if __name__ == "__main__":
    main()
