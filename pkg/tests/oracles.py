"""Brute-force reference computations used only by the tests.

Nothing here calls the package's DP or transform code; each oracle works from
enumeration over explicit outcomes so it can certify the fast paths.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from functools import lru_cache


def law(d):
    return [(float(v), float(p)) for v, p in zip(d.support, d.probs)]


def enum_max_law(pairs, k):
    """Law of the max of k i.i.d. draws by enumerating all k-tuples."""
    out = defaultdict(float)
    for combo in itertools.product(pairs, repeat=k):
        out[max(v for v, _ in combo)] += math.prod(p for _, p in combo)
    return dict(out)


def expected_max(pairs_x, pairs_y):
    return math.fsum(px * py * max(x, y) for x, px in pairs_x for y, py in pairs_y)


def game_tree_value(pairs, batches, b):
    """Optimal value of the batched game (``batches`` batches of size b) by recursion over full histories.

    At each node the gambler sees the current batch and may take any of its
    values or move on; no i.i.d. shortcut is used, the history is carried along.
    """

    @lru_cache(maxsize=None)
    def node(history: tuple) -> float:
        if len(history) == batches * b:
            return 0.0
        total = 0.0
        for batch in itertools.product(pairs, repeat=b):
            prob = math.prod(p for _, p in batch)
            vals = tuple(v for v, _ in batch)
            total += prob * max(max(vals), node(history + vals))
        return total

    return node(())


def prophet_by_enumeration(pairs, n):
    return math.fsum(math.prod(p for _, p in c) * max(v for v, _ in c)
                     for c in itertools.product(pairs, repeat=n))


def threshold_values(pairs, n):
    """V_1..V_n by the plain recursion, written out without the package."""
    V = [0.0]
    for _ in range(n):
        t = V[-1]
        V.append(math.fsum(p * max(v, t) for v, p in pairs))
    return V


def two_point_grid_ratio(k, grid=400):
    """Smallest V_k/E_k over two-point laws {a: 1-p, 1: p}, a in [0, 1), on a grid."""
    best = 1.0
    for i in range(grid):
        a = i / grid
        for j in range(1, grid):
            p = j / grid
            pairs = [(a, 1 - p), (1.0, p)]
            V = threshold_values(pairs, k)[k]
            E = a * (1 - p) ** k + 1.0 - (1 - p) ** k
            best = min(best, V / E)
    return best


def delta_by_pairs(pairs, thresholds, k):
    """Window-over-batch gap: conditioning on exceeding each threshold directly."""
    total, reach = 0.0, 1.0
    for i in range(k - 1):
        t = thresholds[i]
        above = [(v, p) for v, p in pairs if v > t]
        q = sum(p for _, p in above)
        if q > 0:
            spread = sum(p1 * p2 * abs(v1 - v2) for v1, p1 in above for v2, p2 in above) / q ** 2
            total += 0.25 * q * q * spread * reach
        reach *= 1 - q
    return total


def failure_mass_pairs(window_pairs, c):
    """E[max(H, T) 1{T > c}] for H, T i.i.d. window maxima (a batch of two windows)."""
    return math.fsum(ph * pt * max(h, t) for h, ph in window_pairs for t, pt in window_pairs if t > c)
