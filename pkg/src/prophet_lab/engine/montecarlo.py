"""Seeded Monte Carlo over independent trajectories.

Trajectory t of root seed s draws its samples from its own generator keyed by
(s, t), so results do not depend on block size, worker count or scheduling.
Per-trajectory payoffs are reassembled in trajectory order before reduction.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from ..dist_core import FiniteDist
from .game import BlockResult, GameSetting, draw_block, validate_block

BLOCK_ELEMENTS = 2_000_000


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    trials: int
    seed: int

    @classmethod
    def from_samples(cls, x: np.ndarray, seed: int) -> "McEstimate":
        x = np.asarray(x, dtype=np.float64)
        T = x.size
        if T < 1:
            raise ValueError("no samples")
        if np.all(x == x[0]):
            return cls(float(x[0]), 0.0, T, seed)
        mu = float(np.sum(x) / T)
        sd = float(np.sqrt(np.sum((x - mu) ** 2) / (T - 1))) if T > 1 else 0.0
        return cls(mu, sd / math.sqrt(T), T, seed)

    def within(self, target: float, z: float = 3.0) -> bool:
        return abs(self.mean - target) <= z * self.stderr + 1e-12


@dataclass
class SimResult:
    setting: GameSetting
    seed: int
    payoff: np.ndarray
    index: np.ndarray
    time: np.ndarray
    flags: dict = field(default_factory=dict)
    observed: dict = field(default_factory=dict)

    @property
    def trials(self) -> int:
        return int(self.payoff.size)

    def estimate(self, x: np.ndarray | None = None) -> McEstimate:
        return McEstimate.from_samples(self.payoff if x is None else x, self.seed)

    @property
    def accepted(self) -> np.ndarray:
        return self.index > 0


Observer = Callable[[np.ndarray], np.ndarray]


def _block_rows(n: int) -> int:
    return max(1, min(4096, BLOCK_ELEMENTS // n))


def _run_range(d, n, runs, seed, start, stop, observers):
    out_runs = [[] for _ in runs]
    out_obs = {name: [] for name in observers}
    rows = _block_rows(n)
    for lo in range(start, stop, rows):
        cnt = min(rows, stop - lo)
        values = draw_block(d, n, seed, lo, cnt)
        ids = np.arange(lo, lo + cnt)
        for slot, (setting, policy) in zip(out_runs, runs):
            res = policy.run_block(setting, values, ids)
            validate_block(setting, res)
            payoff = np.zeros(cnt)
            acc = res.index > 0
            payoff[acc] = values[acc, res.index[acc] - 1]
            slot.append((payoff, res))
        for name, fn in observers.items():
            out_obs[name].append(np.asarray(fn(values)))
    return out_runs, out_obs


def _merge(parts: Sequence[tuple[np.ndarray, BlockResult]]):
    payoff = np.concatenate([p for p, _ in parts])
    index = np.concatenate([r.index for _, r in parts])
    time = np.concatenate([r.time for _, r in parts])
    keys = set().union(*(r.flags.keys() for _, r in parts))
    flags = {k: np.concatenate([r.flags[k] for _, r in parts]) for k in sorted(keys)}
    return payoff, index, time, flags


def simulate_paired(d: FiniteDist, runs: Sequence[tuple[GameSetting, object]], trials: int, seed: int,
                    workers: int = 1, observers: Mapping[str, Observer] | None = None) -> list[SimResult]:
    """Run several (setting, policy) pairs on the same trajectories."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if not runs:
        raise ValueError("nothing to simulate")
    n = runs[0][0].n
    for setting, policy in runs:
        if setting.n != n:
            raise ValueError("paired runs must share n")
        policy.check(setting)
    observers = dict(observers or {})

    if workers <= 1 or trials < 2 * _block_rows(n):
        chunks = [_run_range(d, n, runs, seed, 0, trials, observers)]
    else:
        edges = np.linspace(0, trials, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(_run_range, d, n, list(runs), seed, int(a), int(b), observers)
                    for a, b in zip(edges[:-1], edges[1:]) if b > a]
            chunks = [f.result() for f in futs]

    observed = {name: np.concatenate([arr for c in chunks for arr in c[1][name]]) for name in observers}
    results = []
    for r, (setting, _) in enumerate(runs):
        payoff, index, time, flags = _merge([part for c in chunks for part in c[0][r]])
        results.append(SimResult(setting, seed, payoff, index, time, flags, observed))
    return results


def simulate(setting: GameSetting, policy, d: FiniteDist, trials: int, seed: int, workers: int = 1,
             observers: Mapping[str, Observer] | None = None) -> SimResult:
    return simulate_paired(d, [(setting, policy)], trials, seed, workers, observers)[0]


def monte_carlo(setting: GameSetting, policy, d: FiniteDist, trials: int, seed: int,
                workers: int = 1) -> McEstimate:
    if trials < 2:
        raise ValueError("monte_carlo needs at least two trials")
    return simulate(setting, policy, d, trials, seed, workers).estimate()
