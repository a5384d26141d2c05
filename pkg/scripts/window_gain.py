"""Exact gain of the window algorithm over its batch rule, against the Δ formula, as w grows."""
import argparse

from prophet_lab.bounds import delta_gap
from prophet_lab.cli import shipped_witness_dir
from prophet_lab.dist_core import from_pairs, kth_root
from prophet_lab.engine import window_gap_exact, window_vs_batch
from prophet_lab.hardsearch import AlphaTable


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--w", type=int, nargs="*", default=[2, 4, 16, 64, 256, 4096])
    ap.add_argument("--mc-trials", type=int, default=20_000, help="paired MC check at the smallest w (0 to skip)")
    args = ap.parse_args()
    table = AlphaTable.from_dir(shipped_witness_dir())
    cases = [("spread", from_pairs({0: 0.3, 2: 0.3, 5: 0.2, 9: 0.2}), 3)]
    cases += [(f"witness{k}", table.get(k).witness, k) for k in (3, 5, 10, 30, 100)]
    print("name,k,delta," + ",".join(f"w={w}" for w in args.w) + ",mc_gap,mc_stderr")
    for name, D, k in cases:
        delta = delta_gap(D, k)
        gaps = [window_gap_exact(kth_root(D, w), k * w, k) for w in args.w]
        mc = ["", ""]
        if args.mc_trials:
            w = args.w[0]
            rep = window_vs_batch(kth_root(D, w), k * w, k, args.mc_trials, seed=1)
            mc = [f"{rep.gap.mean:.5f}", f"{rep.gap.stderr:.5f}"]
        print(f"{name},{k},{delta:.5f}," + ",".join(f"{g:.5f}" for g in gaps) + "," + ",".join(mc))


if __name__ == "__main__":
    main()
