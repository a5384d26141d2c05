"""Game settings, the visible state a policy sees, and single-trajectory play."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, NamedTuple, Optional

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from ..dist_core import FiniteDist

STANDARD, BATCHED, WINDOWED = "standard", "batched", "windowed"


class ContractViolation(RuntimeError):
    """A policy tried to accept a sample that is not currently visible."""


@dataclass(frozen=True)
class GameSetting:
    mode: str
    n: int
    param: int = 1  # batch size b or window size w

    def __post_init__(self):
        if self.mode not in (STANDARD, BATCHED, WINDOWED):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.mode == STANDARD and self.param != 1:
            object.__setattr__(self, "param", 1)
        if self.mode == BATCHED and (self.param < 1 or self.n % self.param):
            raise ValueError(f"batch size {self.param} must divide n={self.n}")
        if self.mode == WINDOWED and not 1 <= self.param <= self.n:
            raise ValueError(f"window size {self.param} must lie in [1, {self.n}]")

    @classmethod
    def standard(cls, n: int) -> "GameSetting":
        return cls(STANDARD, n)

    @classmethod
    def batched(cls, n: int, b: int) -> "GameSetting":
        return cls(BATCHED, n, b)

    @classmethod
    def windowed(cls, n: int, w: int) -> "GameSetting":
        return cls(WINDOWED, n, w)

    def with_n(self, n: int) -> "GameSetting":
        return replace(self, n=n)

    def steps(self):
        """Yield (first visible index, last revealed index), 1-based, per decision point."""
        n, w = self.n, self.param
        if self.mode == BATCHED:
            for end in range(w, n + 1, w):
                yield end - w + 1, end
        elif self.mode == WINDOWED:
            for i in range(1, n + 1):
                yield max(1, i - w + 1), i
        else:
            for i in range(1, n + 1):
                yield i, i

    def visible_range(self, time: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised visible index range at decision time(s)."""
        time = np.asarray(time)
        if self.mode == WINDOWED:
            return np.maximum(1, time - self.param + 1), time
        if self.mode == BATCHED:
            return time - self.param + 1, time
        return time, time


@dataclass(frozen=True)
class ViewState:
    """Samples currently available for acceptance.

    ``values[j]`` is the sample with absolute (1-based) index ``start + j``.
    """

    start: int
    values: np.ndarray
    consumed: int
    n: int

    @property
    def visible(self) -> list[tuple[int, float]]:
        return [(self.start + j, float(x)) for j, x in enumerate(self.values)]

    @property
    def newest(self) -> tuple[int, float]:
        return self.consumed, float(self.values[-1])

    def argmax(self) -> int:
        """Absolute index of the earliest visible maximum."""
        return self.start + int(np.argmax(self.values))

    def last_argmax(self) -> int:
        """Absolute index of the latest visible maximum."""
        return self.start + self.values.size - 1 - int(np.argmax(self.values[::-1]))


class Outcome(NamedTuple):
    value: float
    index: Optional[int]


Decider = Callable[[ViewState], Optional[int]]


@dataclass
class BlockResult:
    """Per-trajectory decisions of a policy on a block of trajectories.

    ``index`` is 1-based (0 = nothing accepted); ``time`` is the number of samples
    revealed when the decision was taken.
    """

    index: np.ndarray
    time: np.ndarray
    flags: dict = field(default_factory=dict)


@lru_cache(maxsize=64)
def _philox_key(seed: int) -> np.ndarray:
    key = SeedSequence(int(seed)).generate_state(2, np.uint64)
    key.flags.writeable = False
    return key


def trajectory_rng(seed: int, trajectory: int, stream: int = 0) -> Generator:
    """Counter-based generator for (seed, trajectory, stream).

    Philox is keyed by the root seed; the trajectory and stream numbers occupy
    the high words of the 256-bit counter, so every trajectory owns a disjoint
    block of the same stream.
    """
    return Generator(Philox(key=_philox_key(seed), counter=[0, 0, int(trajectory), int(stream)]))


class TrajectoryStreams:
    """Reusable cursor giving the same draws as trajectory_rng without rebuilding generators."""

    def __init__(self, seed: int, stream: int = 0):
        self._key = _philox_key(seed)
        self._stream = np.uint64(stream)
        self._bg = Philox(key=self._key)
        self.gen = Generator(self._bg)

    def at(self, trajectory: int) -> Generator:
        self._bg.state = {
            "bit_generator": "Philox",
            "state": {"counter": np.array([0, 0, trajectory, self._stream], dtype=np.uint64), "key": self._key},
            "buffer": np.zeros(4, dtype=np.uint64), "buffer_pos": 4, "has_uint32": 0, "uinteger": 0,
        }
        return self.gen


def draw_trajectory(d: FiniteDist, n: int, seed: int, trajectory: int) -> np.ndarray:
    return d.sample(trajectory_rng(seed, trajectory).random(n))


def draw_block(d: FiniteDist, n: int, seed: int, start: int, count: int) -> np.ndarray:
    u = np.empty((count, n))
    streams = TrajectoryStreams(seed)
    for r in range(count):
        u[r] = streams.at(start + r).random(n)
    return d.sample(u)


def run_decider(setting: GameSetting, decide: Decider, values: np.ndarray) -> tuple[int, int]:
    """Step a decider through one trajectory; returns (index or 0, decision time)."""
    n = setting.n
    for lo, hi in setting.steps():
        choice = decide(ViewState(lo, values[lo - 1:hi], hi, n))
        if choice is not None:
            if not lo <= choice <= hi:
                raise ContractViolation(
                    f"policy accepted index {choice} but only {lo}..{hi} are visible at step {hi}")
            return int(choice), hi
    return 0, n


def play_values(setting: GameSetting, policy, values: np.ndarray, trajectory: int = 0) -> Outcome:
    policy.check(setting)
    idx, _ = run_decider(setting, policy.decider(setting, trajectory), values)
    return Outcome(float(values[idx - 1]), idx) if idx else Outcome(0.0, None)


def play(setting: GameSetting, policy, d: FiniteDist, seed: int, trajectory: int = 0) -> Outcome:
    """Play one game; trajectory ``t`` of seed ``s`` is the same game monte_carlo sees."""
    return play_values(setting, policy, draw_trajectory(d, setting.n, seed, trajectory), trajectory)


def validate_block(setting: GameSetting, res: BlockResult) -> None:
    acc = res.index > 0
    if not np.any(acc):
        return
    lo, hi = setting.visible_range(res.time[acc])
    bad = (res.index[acc] < lo) | (res.index[acc] > hi) | (res.time[acc] > setting.n)
    if setting.mode == BATCHED:
        bad |= res.time[acc] % setting.param != 0
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        raise ContractViolation(
            f"policy accepted index {res.index[acc][j]} at time {res.time[acc][j]}, not visible")
