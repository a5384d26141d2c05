"""Backward-induction values for the i.i.d. gambler and the prophet.

Conventions shared with the simulator: a sample is accepted only if it is
strictly larger than the continuation value, and the last threshold is 0, so a
zero-valued sample is never taken.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .dist_core import FiniteDist, max_power, mean


@dataclass(frozen=True, eq=False)
class StoppingTable:
    """Gambler values V_1..V_n, prophet values E_1..E_n and thresholds t_1..t_n.

    ``thresholds[i-1]`` is the value the i-th sample must strictly beat, i.e.
    V_{n-i}, with t_n = 0.
    """

    dist: FiniteDist
    horizon: int
    gambler_values: np.ndarray
    prophet_values: np.ndarray
    thresholds: np.ndarray

    def V(self, k: int) -> float:
        return 0.0 if k == 0 else float(self.gambler_values[k - 1])

    def E(self, k: int) -> float:
        return 0.0 if k == 0 else float(self.prophet_values[k - 1])

    @property
    def ratio(self) -> float:
        return competitive_ratio_from(self)


class _MaxWithConstant:
    """Evaluates t -> E[max{X, t}] = t P(X <= t) + sum_{v > t} v p_v."""

    def __init__(self, d: FiniteDist):
        self.support = [float(x) for x in d.support]
        self.cdf = [float(x) for x in d.cdf_values]
        vp = d.support * d.probs
        # upper tails sum_{j >= i} v_j p_j, each compensated
        self.tail = [math.fsum(vp[i:]) for i in range(d.size)] + [0.0]

    def __call__(self, t: float) -> float:
        i = bisect.bisect_right(self.support, t)  # support[:i] <= t
        if i == 0:
            return self.tail[0]
        return math.fsum((t * self.cdf[i - 1], self.tail[i]))


def gambler_values(d: FiniteDist, n: int) -> np.ndarray:
    """V_1..V_n by backward induction, V_1 = E[X]."""
    if n < 1:
        raise ValueError("horizon must be at least 1")
    step = _MaxWithConstant(d)
    out = np.empty(n)
    v = mean(d)
    out[0] = v
    for k in range(1, n):
        v = step(v)
        out[k] = v
    return out


def prophet_value(d: FiniteDist, k: int) -> float:
    """E_k through E[max] = v_0 + sum_i (v_{i+1} - v_i) P(max > v_i)."""
    if d.size == 1:
        return float(d.support[0])
    tail = -np.expm1(k * np.log1p(-d.survival_values[:-1]))
    return float(d.support[0] + math.fsum(np.diff(d.support) * tail))


def prophet_values(d: FiniteDist, n: int) -> np.ndarray:
    """E_k = E[max of k draws] for k = 1..n."""
    if n < 1:
        raise ValueError("horizon must be at least 1")
    if n <= 64:
        return np.array([mean(max_power(d, k)) for k in range(1, n + 1)])
    if d.size == 1:
        return np.full(n, float(d.support[0]))
    # same identity as prophet_value, vectorised over k in chunks
    out = np.empty(n)
    gaps = np.diff(d.support)
    log1mG = np.log1p(-d.survival_values[:-1])
    chunk = max(1, 2**20 // d.size)
    for lo in range(0, n, chunk):
        kk = np.arange(lo + 1, min(n, lo + chunk) + 1, dtype=np.float64)[:, None]
        out[lo:lo + kk.shape[0]] = d.support[0] + (-np.expm1(kk * log1mG[None, :])) @ gaps
    return out


def build_table(d: FiniteDist, n: int) -> StoppingTable:
    V = gambler_values(d, n)
    E = prophet_values(d, n)
    thresholds = np.concatenate([V[:-1][::-1], [0.0]])
    for arr in (V, E, thresholds):
        arr.setflags(write=False)
    return StoppingTable(d, n, V, E, thresholds)


def competitive_ratio_from(table: StoppingTable) -> float:
    En = table.E(table.horizon)
    if En <= 0:
        raise ValueError("prophet value zero")
    return table.V(table.horizon) / En


def competitive_ratio(d: FiniteDist, n: int) -> float:
    """V_n / E_n."""
    if n < 1:
        raise ValueError("horizon must be at least 1")
    En = prophet_value(d, n) if n > 64 else mean(max_power(d, n))
    if En <= 0:
        raise ValueError("prophet value zero")
    return float(gambler_values(d, n)[-1]) / En


def batch_value(d_prime: FiniteDist, n: int, b: int) -> float:
    """Optimal value of the batched game: V_{n/b} of the batch-maximum law."""
    if b < 1 or n % b:
        raise ValueError(f"batch size {b} does not divide n={n}")
    return float(gambler_values(max_power(d_prime, b), n // b)[-1])


def acceptance_probs(d_batchmax: FiniteDist, horizon: int) -> np.ndarray:
    """q_i = P(X > t_i) for the thresholds of build_table(d_batchmax, horizon)."""
    table = build_table(d_batchmax, horizon)
    return exceedance(d_batchmax, table.thresholds)


def exceedance(d: FiniteDist, thresholds) -> np.ndarray:
    idx = np.searchsorted(d.support, np.asarray(thresholds, dtype=float), side="right") - 1
    surv = np.concatenate([[1.0], d.survival_values])
    return surv[idx + 1]


# -- fast evaluator for search ------------------------------------------------

def fast_ratio(support: np.ndarray, probs: np.ndarray, k: int) -> float:
    """V_k / E_k in O(m) time, independent of k.

    Between consecutive support points the continuation map t -> t F + T is
    affine, so runs of the recursion are jumped in closed form.  Used as the
    search objective only; reported ratios always come from the plain
    recursion in :func:`competitive_ratio`.
    """
    v = np.asarray(support, dtype=np.float64)
    p = np.asarray(probs, dtype=np.float64)
    S = np.cumsum(p)
    S[-1] = 1.0
    G = np.concatenate([np.cumsum(p[::-1])[::-1][1:], [0.0]])
    vp = v * p
    T = np.concatenate([np.cumsum(vp[::-1])[::-1], [0.0]])  # T[i] = sum_{j>=i} v_j p_j
    m = v.size
    t = T[0]
    steps = k - 1
    j = int(np.searchsorted(v, t, side="right")) - 1
    while steps > 0 and j < m - 1:
        F, C = S[j], T[j + 1]
        if F >= 1.0:
            break  # the mass above v_j underflowed; nothing left to gain
        fixed = C / (1.0 - F)  # E[X | X > v_j] >= v_{j+1}
        nxt = v[j + 1]
        if fixed <= nxt:
            r = steps  # top segment: converges to v_max without crossing
        else:
            # smallest r >= 1 with fixed - (fixed - t) F^r >= nxt
            ratio = (fixed - nxt) / (fixed - t)
            r = math.ceil(math.log(ratio) / math.log(F)) if ratio > 0 else 1
            r = max(1, min(r, steps))
        t = fixed - (fixed - t) * F**r
        steps -= r
        while j < m - 1 and v[j + 1] <= t:
            j += 1
    # once t >= top support point, E[max{X, t}] = t
    gaps = np.diff(v)
    with np.errstate(divide="ignore"):
        tail = -np.expm1(k * np.log1p(-G[:-1]))
    E = v[0] + float(tail @ gaps)
    return t / E

