"""Composite experiments built on the simulator."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..dist_core import FiniteDist, from_pairs, max_power, point_mass, zero_pad
from ..stopping_dp import build_table, competitive_ratio, prophet_value
from .game import GameSetting
from .montecarlo import McEstimate, simulate, simulate_paired
from .policies import Policy, ThresholdPolicy, window_algo_A


# -- exact evaluation of small non-identical windowed games -----------------

def windowed_value_exact(dists: Sequence[FiniteDist], w: int) -> float:
    """Optimal windowed-game value for independent, non-identical finite laws.

    Backward induction over the contents of the window; exponential in w, meant
    for small demonstration instances.
    """
    n = len(dists)
    laws = [tuple(zip(map(float, d.support), map(float, d.probs))) for d in dists]

    @lru_cache(maxsize=None)
    def value(t: int, window: tuple) -> float:
        # t samples revealed; window holds the visible ones
        best_now = max(window) if window else 0.0
        if t == n:
            return best_now
        cont = 0.0
        for x, p in laws[t]:
            nxt = (window + (x,))[-w:]
            cont += p * value(t + 1, nxt)
        return max(best_now, cont)

    return value(0, ())


def prophet_exact(dists: Sequence[FiniteDist]) -> float:
    laws = [list(zip(map(float, d.support), map(float, d.probs))) for d in dists]
    total = []
    for combo in itertools.product(*laws):
        total.append(max(x for x, _ in combo) * math.prod(p for _, p in combo))
    return math.fsum(total)


def noniid_sequence(eps: float, n: int) -> list[FiniteDist]:
    """X_1 = 1, X_2..X_{n-1} = 0, X_n = 1/eps with probability eps (else 0)."""
    return [point_mass(1.0)] + [point_mass(0.0)] * (n - 2) + [from_pairs({0.0: 1 - eps, 1.0 / eps: eps})]


def noniid_demo(eps: float, n: int, w: int) -> tuple[float, float]:
    """(gambler value, prophet value) of the non-i.i.d. counterexample with window w."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if w >= n:
        raise ValueError("window covers the whole input: the gambler sees everything and the ratio is 1")
    if w < 2 or n < 3:
        raise ValueError("need 2 <= w < n")
    seq = noniid_sequence(eps, n)
    return windowed_value_exact(seq, w), prophet_exact(seq)


# -- zero padding -----------------------------------------------------------

@dataclass(frozen=True)
class CollisionObserver:
    """1 where two nonzero samples fall inside one window of size k."""

    k: int

    def __call__(self, values: np.ndarray) -> np.ndarray:
        c = np.cumsum(values > 0, axis=1)
        in_window = c.copy()
        in_window[:, self.k:] -= c[:, :-self.k]
        return (in_window >= 2).any(axis=1).astype(np.float64)


@dataclass(frozen=True)
class PaddingReport:
    n: int
    k: int
    p: float
    windowed: McEstimate          # payoff of the windowed game on the padded law
    windowed_ratio: float
    windowed_ratio_stderr: float
    prophet_padded: float
    standard_horizon: int
    standard_ratio: float         # exact DP ratio of d_m at horizon round(n p)
    collision: McEstimate
    collision_bound: float        # n k p^2
    regime_ok: bool               # n k p^2 < 1


def padding_experiment(d_m: FiniteDist, n: int, k: int, p: float, policy: Policy | None,
                       trials: int, seed: int, workers: int = 1) -> PaddingReport:
    """Windowed game (window k) on zero_pad(d_m, p) against the standard game on d_m with n p samples."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    padded = zero_pad(d_m, p)
    if policy is None:
        policy = ThresholdPolicy.from_table(build_table(padded, n))
    setting = GameSetting.windowed(n, k)
    res = simulate(setting, policy, padded, trials, seed, workers, observers={"collision": CollisionObserver(k)})
    est = res.estimate()
    E = prophet_value(padded, n)
    m = max(1, round(n * p))
    bound = n * k * p * p
    return PaddingReport(
        n=n, k=k, p=p, windowed=est, windowed_ratio=est.mean / E, windowed_ratio_stderr=est.stderr / E,
        prophet_padded=E, standard_horizon=m, standard_ratio=competitive_ratio(d_m, m),
        collision=res.estimate(res.observed["collision"]), collision_bound=bound, regime_ok=bound < 1,
    )


# -- window algorithm against its shadow batch rule ---------------------------

@dataclass(frozen=True)
class GapReport:
    window: McEstimate
    batch: McEstimate
    gap: McEstimate
    min_gap: float  # smallest per-trajectory gap; never negative by construction


def window_vs_batch(d: FiniteDist, n: int, k: int, trials: int, seed: int, workers: int = 1,
                    policy=None) -> GapReport:
    """Paired-seed comparison of the window algorithm and the batch rule it shadows."""
    algo = policy if policy is not None else window_algo_A(d, n, k)
    w = n // k
    win, bat = simulate_paired(
        d, [(GameSetting.windowed(n, w), algo), (GameSetting.batched(n, w), algo.shadow_batch_policy())],
        trials, seed, workers)
    gap = win.payoff - bat.payoff
    return GapReport(win.estimate(), bat.estimate(), win.estimate(gap), float(gap.min()))


def window_gap_exact(d: FiniteDist, n: int, k: int) -> float:
    """Exact expected gain of the window algorithm over the batch rule it shadows.

    When the batch rule takes X* = v from batch i < k, with the latest copy of v
    at position r of that batch, the window algorithm instead takes the larger
    of v and the first r - 1 samples of batch i + 1.  In the last batch the two
    coincide.
    """
    if k < 1 or n % k:
        raise ValueError(f"k={k} must divide n={n}")
    w = n // k
    v, p = d.support, d.probs
    F = np.minimum(np.cumsum(p), 1.0)
    F_below = np.concatenate([[0.0], F[:-1]])
    thresholds = build_table(max_power(d, w), k).thresholds
    j = np.arange(w)[:, None]                        # r - 1 = 0 .. w - 1
    # P(max of j fresh draws = v_b), rows j, columns b
    max_law = F[None, :] ** j - F_below[None, :] ** j
    terms, reach = [], 1.0
    for i in range(k - 1):
        t = thresholds[i]
        above = np.flatnonzero(v > t)
        for a in above:
            # P(batch maximum is v_a with its latest copy at position j + 1)
            pos = F[a] ** j[:, 0] * p[a] * F_below[a] ** (w - 1 - j[:, 0])
            gain = max_law[:, a + 1:] @ (v[a + 1:] - v[a])
            terms.append(reach * float(pos @ gain))
        reach *= float(p[v <= t].sum()) ** w
    return math.fsum(terms)
