"""Out-of-batch failure rate of the window-to-batch reduction with a uniform offset."""
import argparse

from prophet_lab.dist_core import from_pairs
from prophet_lab.engine import GameSetting, batch_from_window, simulate_paired, uniform_offset_wrapper, window_algo_A


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--b-multiples", type=int, nargs="*", default=[2, 5, 10, 20])
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    d = from_pairs({0: 0.5, 1: 0.4, 10: 0.1})
    n, k = args.n, args.k
    print("b,failure_rate,stderr,bound")
    for mult in args.b_multiples:
        b = mult * k
        if n % b:
            continue
        m = n - n % b - b
        wrapped = uniform_offset_wrapper(window_algo_A(d, m, m // k), n, b, seed=args.seed)
        (res,) = simulate_paired(d, [(GameSetting.batched(n, b), batch_from_window(wrapped, n, b, k))],
                                 args.trials, args.seed)
        est = res.estimate(res.flags["failed"].astype(float))
        print(f"{b},{est.mean:.5f},{est.stderr:.5f},{(k - 1) / b:.5f}")


if __name__ == "__main__":
    main()
