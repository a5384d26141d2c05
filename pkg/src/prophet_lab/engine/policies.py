"""Stopping policies.

Every policy offers two equivalent entry points: ``decider`` returns a
stateful callable that is stepped through a single game by
:func:`~prophet_lab.engine.game.play`, and ``run_block`` decides a whole block
of pre-drawn trajectories at once with numpy.  The test-suite checks that the
two agree trajectory by trajectory.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dist_core import FiniteDist, max_power
from ..stopping_dp import StoppingTable, build_table
from .game import (BATCHED, STANDARD, WINDOWED, BlockResult, GameSetting, TrajectoryStreams, ViewState,
                   run_decider, trajectory_rng)


class Policy:
    modes: tuple[str, ...] = (STANDARD, BATCHED, WINDOWED)
    name = "policy"

    def check(self, setting: GameSetting) -> None:
        if setting.mode not in self.modes:
            raise ValueError(f"{self.name} cannot play in {setting.mode} mode")

    def decider(self, setting: GameSetting, trajectory: int):
        raise NotImplementedError

    def run_block(self, setting: GameSetting, values: np.ndarray, traj_ids: np.ndarray) -> BlockResult:
        """Fallback: step each trajectory through its decider."""
        T = values.shape[0]
        index = np.zeros(T, dtype=np.int64)
        time = np.zeros(T, dtype=np.int64)
        for r in range(T):
            index[r], time[r] = run_decider(setting, self.decider(setting, int(traj_ids[r])), values[r])
        return BlockResult(index, time)


def _first_true(mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    hit = mask.any(axis=1)
    return hit, np.argmax(mask, axis=1)


def _as_thresholds(x) -> np.ndarray:
    arr = np.array(x, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ThresholdPolicy(Policy):
    """Accept sample i iff it strictly exceeds t_i.

    In batched mode the samples of a batch are screened in arrival order, which
    makes batched play with b = 1 identical to standard play.
    """

    thresholds: np.ndarray
    name = "threshold"

    def __post_init__(self):
        object.__setattr__(self, "thresholds", _as_thresholds(self.thresholds))

    @classmethod
    def from_table(cls, table: StoppingTable) -> "ThresholdPolicy":
        return cls(table.thresholds)

    def check(self, setting):
        super().check(setting)
        if setting.n != self.thresholds.size:
            raise ValueError(f"threshold policy built for horizon {self.thresholds.size}, game has n={setting.n}")

    def decider(self, setting, trajectory):
        thr = self.thresholds

        def decide(view: ViewState):
            if setting.mode == BATCHED:
                hits = np.flatnonzero(view.values > thr[view.start - 1:view.consumed])
                return view.start + int(hits[0]) if hits.size else None
            i, x = view.newest
            return i if x > thr[i - 1] else None

        return decide

    def run_block(self, setting, values, traj_ids):
        hit, first = _first_true(values > self.thresholds[None, :])
        index = np.where(hit, first + 1, 0)
        if setting.mode == BATCHED:
            b = setting.param
            time = np.where(hit, -(-index // b) * b, setting.n)
        else:
            time = np.where(hit, index, setting.n)
        return BlockResult(index, time)


def threshold_policy(table: StoppingTable) -> ThresholdPolicy:
    return ThresholdPolicy.from_table(table)


@dataclass(frozen=True, eq=False)
class BatchPolicy(Policy):
    """Batched mode: accept the (earliest) batch maximum iff it beats the batch threshold."""

    thresholds: np.ndarray
    b: int
    modes = (BATCHED,)
    name = "batch"

    def __post_init__(self):
        object.__setattr__(self, "thresholds", _as_thresholds(self.thresholds))

    def check(self, setting):
        super().check(setting)
        if setting.param != self.b or setting.n != self.b * self.thresholds.size:
            raise ValueError("batch policy does not match the game's batch size or length")

    def decider(self, setting, trajectory):
        thr, b = self.thresholds, self.b

        def decide(view: ViewState):
            j = view.consumed // b
            pos = view.argmax()
            return pos if view.values[pos - view.start] > thr[j - 1] else None

        return decide

    def run_block(self, setting, values, traj_ids):
        T = values.shape[0]
        b, K = self.b, self.thresholds.size
        batches = values.reshape(T, K, b)
        bmax = batches.max(axis=2)
        bpos = batches.argmax(axis=2)
        hit, j = _first_true(bmax > self.thresholds[None, :])
        rows = np.arange(T)
        index = np.where(hit, j * b + bpos[rows, j] + 1, 0)
        time = np.where(hit, (j + 1) * b, setting.n)
        return BlockResult(index, time)


def batch_policy(table: StoppingTable, b: int) -> BatchPolicy:
    """Policy for a table built on max_power(d, b) with horizon n / b."""
    return BatchPolicy(table.thresholds, b)


@dataclass(frozen=True, eq=False)
class WindowAlgoA(Policy):
    """Window size w = n/k.  Shadow the optimal batch rule on aligned batches of
    size w; once it would take X*, keep sliding until X* is the oldest visible
    sample (or the input ends) and take the largest visible sample.

    When the batch maximum is tied, X* is its latest copy: the payoff so far is
    the same and the window then reaches furthest into the next batch.
    """

    thresholds: np.ndarray  # batch thresholds, length k
    w: int
    modes = (WINDOWED,)
    name = "window-A"

    def __post_init__(self):
        object.__setattr__(self, "thresholds", _as_thresholds(self.thresholds))

    @property
    def k(self) -> int:
        return self.thresholds.size

    def check(self, setting):
        super().check(setting)
        if setting.param != self.w or setting.n != self.w * self.k:
            raise ValueError("window algorithm needs window w = n/k")

    def shadow_batch_policy(self) -> BatchPolicy:
        """The batch rule this algorithm simulates (same thresholds)."""
        return BatchPolicy(self.thresholds, self.w)

    def decider(self, setting, trajectory):
        thr, w, n = self.thresholds, self.w, setting.n
        state = {"target": None}

        def decide(view: ViewState):
            c = view.consumed
            if state["target"] is None and c % w == 0:
                # the window now coincides with batch c / w
                pos = view.last_argmax()
                if view.values[pos - view.start] > thr[c // w - 1]:
                    state["target"] = min(pos + w - 1, n)
            if state["target"] == c:
                return view.argmax()
            return None

        return decide

    def run_block(self, setting, values, traj_ids):
        T = values.shape[0]
        w, k, n = self.w, self.k, setting.n
        batches = values.reshape(T, k, w)
        bmax = batches.max(axis=2)
        bpos = w - 1 - batches[:, :, ::-1].argmax(axis=2)  # latest copy of each batch maximum
        hit, j = _first_true(bmax > self.thresholds[None, :])
        index = np.zeros(T, dtype=np.int64)
        time = np.full(T, n, dtype=np.int64)
        for r in np.flatnonzero(hit):
            xstar = j[r] * w + bpos[r, j[r]] + 1
            tau = min(xstar + w - 1, n)
            lo = tau - w  # 0-based start of the window ending at tau
            index[r] = lo + 1 + int(np.argmax(values[r, lo:tau]))
            time[r] = tau
        return BlockResult(index, time)


def _batch_table(d: FiniteDist, n: int, k: int) -> tuple[StoppingTable, int]:
    if k < 1 or n % k:
        raise ValueError(f"k={k} must divide n={n}")
    w = n // k
    return build_table(max_power(d, w), k), w


def window_algo_A(d: FiniteDist, n: int, k: int) -> WindowAlgoA:
    table, w = _batch_table(d, n, k)
    return WindowAlgoA(table.thresholds, w)


def window_algo_A_prime(d: FiniteDist, n: int, k: int, eps3: float) -> WindowAlgoA:
    """As :func:`window_algo_A` but the second-to-last batch threshold V_1 becomes (1 - eps3) V_1.

    With the batch maximum scaled to mean 1 that threshold is exactly 1 - eps3.
    """
    if not 0 < eps3 < 1:
        raise ValueError("eps3 must lie in (0, 1)")
    if k < 2:
        raise ValueError("A' needs at least two batches")
    table, w = _batch_table(d, n, k)
    thr = np.array(table.thresholds)
    thr[k - 2] *= 1.0 - eps3
    return WindowAlgoA(thr, w)


@dataclass(frozen=True, eq=False)
class WindowMaxPolicy(Policy):
    """Windowed mode: wait until the end and take the largest sample still visible."""

    modes = (WINDOWED,)
    name = "window-max"

    def decider(self, setting, trajectory):
        def decide(view: ViewState):
            return view.argmax() if view.consumed == setting.n else None

        return decide

    def run_block(self, setting, values, traj_ids):
        n, w = setting.n, setting.param
        index = n - w + 1 + np.argmax(values[:, n - w:], axis=1)
        return BlockResult(index.astype(np.int64), np.full(values.shape[0], n, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class UniformOffset(Policy):
    """Skip a uniform s in {1..b} samples, run ``inner`` on the next m = n - (n mod b) - b,
    and ignore the rest, so the accepted index is uniform modulo b.
    """

    inner: Policy
    n: int
    b: int
    seed: int
    modes = (STANDARD, WINDOWED)
    name = "uniform-offset"

    def __post_init__(self):
        if not 1 <= self.b <= self.n:
            raise ValueError("offset wrapper needs 1 <= b <= n")
        if self.m < 1:
            raise ValueError("input too short for offset wrapper")

    @property
    def m(self) -> int:
        return self.n - (self.n % self.b) - self.b

    def inner_setting(self, setting: GameSetting) -> GameSetting:
        return setting.with_n(self.m) if setting.mode == STANDARD else GameSetting(
            setting.mode, self.m, min(setting.param, self.m))

    def check(self, setting):
        super().check(setting)
        if setting.n != self.n:
            raise ValueError("offset wrapper built for a different n")
        self.inner.check(self.inner_setting(setting))

    def offset(self, trajectory: int) -> int:
        return int(trajectory_rng(self.seed, trajectory, stream=1).integers(1, self.b + 1))

    def offsets(self, traj_ids) -> np.ndarray:
        streams = TrajectoryStreams(self.seed, stream=1)
        return np.array([streams.at(int(t)).integers(1, self.b + 1) for t in traj_ids], dtype=np.int64)

    def decider(self, setting, trajectory):
        s, m = self.offset(trajectory), self.m
        inner = self.inner.decider(self.inner_setting(setting), trajectory)

        def decide(view: ViewState):
            c = view.consumed
            if c <= s or c > s + m:
                return None
            lo = max(view.start, s + 1)
            choice = inner(ViewState(lo - s, view.values[lo - view.start:], c - s, m))
            return None if choice is None else choice + s

        return decide

    def run_block(self, setting, values, traj_ids):
        s = self.offsets(traj_ids)
        m = self.m
        sub = values[np.arange(values.shape[0])[:, None], s[:, None] + np.arange(m)[None, :]]
        res = self.inner.run_block(self.inner_setting(setting), sub, traj_ids)
        acc = res.index > 0
        index = np.where(acc, res.index + s, 0)
        time = np.where(acc, res.time + s, setting.n)
        flags = dict(res.flags)
        flags["offset"] = s
        return BlockResult(index, time, flags)


def uniform_offset_wrapper(inner: Policy, n: int, b: int, seed: int) -> UniformOffset:
    return UniformOffset(inner, n, b, seed)


class _BatchFromWindowDecider:
    def __init__(self, owner: "BatchFromWindow", setting: GameSetting, trajectory: int):
        self.k = owner.k
        self.n = setting.n
        self.inner = owner.inner.decider(owner.window_setting(setting), trajectory)
        self.history = np.empty(setting.n)
        self.failed = False

    def __call__(self, view: ViewState):
        if self.failed:
            return None
        self.history[view.start - 1:view.consumed] = view.values
        for i in range(view.start, view.consumed + 1):
            lo = max(1, i - self.k + 1)
            choice = self.inner(ViewState(lo, self.history[lo - 1:i], i, self.n))
            if choice is not None:
                if choice >= view.start:
                    return choice
                self.failed = True  # the window rule picked a sample of an earlier batch
                return None
        return None


@dataclass(frozen=True, eq=False)
class BatchFromWindow(Policy):
    """Batched-mode rule built from a window-k rule: feed each batch to the window
    rule one sample at a time and take its pick if it lies in the current batch;
    if it picks an earlier sample the game ends with payoff 0.
    """

    inner: Policy
    k: int
    b: int
    modes = (BATCHED,)
    name = "batch-from-window"

    def __post_init__(self):
        if not 1 <= self.k <= self.b:
            raise ValueError("need window k <= batch size b")

    def window_setting(self, setting: GameSetting) -> GameSetting:
        return GameSetting.windowed(setting.n, self.k)

    def check(self, setting):
        super().check(setting)
        if setting.param != self.b:
            raise ValueError("batch size mismatch")
        self.inner.check(self.window_setting(setting))

    def decider(self, setting, trajectory):
        return _BatchFromWindowDecider(self, setting, trajectory)

    def run_block(self, setting, values, traj_ids):
        res = self.inner.run_block(self.window_setting(setting), values, traj_ids)
        b = self.b
        acc = res.index > 0
        batch_of_time = (res.time - 1) // b
        same = acc & ((res.index - 1) // b == batch_of_time)
        index = np.where(same, res.index, 0)
        time = np.where(same, (batch_of_time + 1) * b, setting.n)
        flags = dict(res.flags)
        flags["failed"] = acc & ~same
        flags["inner_index"] = res.index
        return BlockResult(index, time, flags)


def batch_from_window(inner: Policy, n: int, b: int, k: int) -> BatchFromWindow:
    if n % b:
        raise ValueError("batch size must divide n")
    return BatchFromWindow(inner, k, b)
