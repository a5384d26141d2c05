"""Finite discrete distributions on [0, inf) and the transforms used throughout.

A :class:`FiniteDist` is immutable.  Every transform returns a fresh instance that
has been through the same hygiene pass as user input, so the invariants
(strictly increasing nonnegative support, strictly positive masses summing to
one) hold everywhere in the package.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

MERGE_TOL = 1e-12
SUM_TOL = 1e-9
NEG_MASS_TOL = 1e-15


class DistributionError(ValueError):
    """Raised for inputs that cannot be turned into a valid FiniteDist."""


def _hygiene(support, probs) -> tuple[np.ndarray, np.ndarray, float]:
    v = np.asarray(support, dtype=np.float64).ravel()
    p = np.asarray(probs, dtype=np.float64).ravel()
    if v.shape != p.shape:
        raise DistributionError("support and probs must have equal length")
    if v.size == 0:
        raise DistributionError("empty distribution")
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(p))):
        raise DistributionError("support and probs must be finite")
    if np.any(v < 0):
        raise DistributionError("support values must be nonnegative")
    if np.any(p < -NEG_MASS_TOL):
        raise DistributionError("probabilities must be nonnegative")
    p = np.where(p < 0, 0.0, p)
    adjustment = 0.0

    order = np.argsort(v, kind="stable")
    v, p = v[order], p[order]

    # merge clusters of points closer than MERGE_TOL into their mass-weighted centre
    if v.size > 1 and np.any(np.diff(v) < MERGE_TOL):
        out_v, out_p = [], []
        start = 0
        for i in range(1, v.size + 1):
            if i == v.size or v[i] - v[i - 1] >= MERGE_TOL:
                cv, cp = v[start:i], p[start:i]
                mass = math.fsum(cp)
                centre = math.fsum(cv * cp) / mass if mass > 0 else cv[0]
                adjustment += float(np.max(np.abs(cv - centre))) * mass
                out_v.append(centre)
                out_p.append(mass)
                start = i
        v, p = np.array(out_v), np.array(out_p)

    keep = p > 0
    if not np.any(keep):
        raise DistributionError("distribution has no positive mass")
    v, p = v[keep], p[keep]

    total = math.fsum(p)
    if abs(total - 1.0) > SUM_TOL:
        raise DistributionError(f"probabilities sum to {total!r}, not 1")
    adjustment += abs(total - 1.0)
    p = p / total
    return v, p, adjustment


@dataclass(frozen=True, eq=False)
class FiniteDist:
    """Nonnegative discrete distribution with finite support.

    ``support`` is strictly increasing, ``probs`` strictly positive and summing
    to one.  Points closer than 1e-12 are merged and the masses renormalised on
    construction; the size of that correction is kept in ``adjustment``.
    """

    support: np.ndarray
    probs: np.ndarray
    adjustment: float = field(default=0.0, compare=False)

    def __post_init__(self):
        v, p, adj = _hygiene(self.support, self.probs)
        v.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "support", v)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "adjustment", adj)

        cdf = np.cumsum(p)
        cdf[-1] = 1.0
        # P(X > v_i) from the top so that thin upper tails keep relative precision
        surv = np.empty_like(p)
        surv[:-1] = np.cumsum(p[::-1])[::-1][1:]
        surv[-1] = 0.0
        cdf.setflags(write=False)
        surv.setflags(write=False)
        object.__setattr__(self, "_cdf", cdf)
        object.__setattr__(self, "_surv", surv)

    # -- basic accessors -------------------------------------------------
    @property
    def size(self) -> int:
        return int(self.support.size)

    @property
    def cdf_values(self) -> np.ndarray:
        """P(X <= v_i) at every support point (last entry exactly 1)."""
        return self._cdf

    @property
    def survival_values(self) -> np.ndarray:
        """P(X > v_i) at every support point (last entry exactly 0)."""
        return self._surv

    @property
    def max_value(self) -> float:
        return float(self.support[-1])

    def as_dict(self) -> dict[float, float]:
        return {float(v): float(p) for v, p in zip(self.support, self.probs)}

    def sample(self, u: np.ndarray) -> np.ndarray:
        """Inverse-CDF map from uniforms in [0, 1) to support values."""
        idx = np.searchsorted(self._cdf, u, side="right")
        np.minimum(idx, self.size - 1, out=idx)
        return self.support[idx]

    def __eq__(self, other):
        if not isinstance(other, FiniteDist):
            return NotImplemented
        return np.array_equal(self.support, other.support) and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.support.tobytes(), self.probs.tobytes()))

    def __repr__(self):
        body = ", ".join(f"{v:.6g}: {p:.6g}" for v, p in zip(self.support, self.probs))
        return f"FiniteDist({{{body}}})"


def from_pairs(pairs: dict[float, float] | Iterable[tuple[float, float]]) -> FiniteDist:
    items = list(pairs.items()) if isinstance(pairs, dict) else list(pairs)
    return FiniteDist([v for v, _ in items], [p for _, p in items])


def point_mass(c: float) -> FiniteDist:
    return FiniteDist([c], [1.0])


def mean(d: FiniteDist) -> float:
    return math.fsum(d.support * d.probs)


def cdf(d: FiniteDist, x: float) -> float:
    """P(X <= x)."""
    i = int(np.searchsorted(d.support, x, side="right")) - 1
    return 0.0 if i < 0 else float(d.cdf_values[i])


def survival(d: FiniteDist, x: float) -> float:
    """P(X > x), summed from the top of the support."""
    i = int(np.searchsorted(d.support, x, side="right")) - 1
    return 1.0 if i < 0 else float(d.survival_values[i])


def quantile_upper(d: FiniteDist, q: float) -> float:
    """Smallest support value v with P(X > v) <= q."""
    if not 0.0 <= q <= 1.0:
        raise DistributionError("q must lie in [0, 1]")
    return float(d.support[int(np.argmax(d.survival_values <= q))])


def cdf_power(d: FiniteDist, r: float) -> FiniteDist:
    """Distribution whose CDF is F(x)**r on the same support, for any real r > 0.

    Integer r gives the law of the maximum of r draws; r = 1/k inverts that.
    Lower points are differenced in CDF space and upper points in survival space
    so that neither a thin bottom nor a thin top loses relative precision.
    """
    if not r > 0:
        raise DistributionError("exponent must be positive")
    if r == 1:
        return d
    S = d.cdf_values
    G = d.survival_values
    with np.errstate(divide="ignore"):
        low = np.exp(r * np.log(S))
        high = -np.expm1(r * np.log1p(-G))  # 1 - (1 - G)**r
    use_low = S <= 0.5
    probs = np.empty_like(S)
    probs[0] = low[0] if use_low[0] else 1.0 - high[0]
    for i in range(1, S.size):
        if use_low[i]:
            probs[i] = low[i] - low[i - 1]
        elif not use_low[i - 1]:
            probs[i] = high[i - 1] - high[i]
        else:
            probs[i] = (1.0 - high[i]) - low[i - 1]
    return FiniteDist(d.support, probs)


def max_power(d: FiniteDist, k: int) -> FiniteDist:
    """Law of max{X_1..X_k} for k i.i.d. draws from d."""
    if k < 1 or int(k) != k:
        raise DistributionError("k must be a positive integer")
    return cdf_power(d, int(k))


def kth_root(d: FiniteDist, k: int) -> FiniteDist:
    """The unique D' with max_power(D', k) == d."""
    if k < 1 or int(k) != k:
        raise DistributionError("k must be a positive integer")
    return cdf_power(d, 1.0 / int(k))


def kth_root_recursive(d: FiniteDist, k: int) -> FiniteDist:
    """Top-down construction: peel off the largest point, solve (1-p')**k = 1-p, recurse.

    Slower and less stable than :func:`kth_root`; kept as an independent check.
    """
    if k < 1 or int(k) != k:
        raise DistributionError("k must be a positive integer")
    v = list(d.support)
    p = list(d.probs)
    out = []
    remaining = 1.0  # P'(X' < current top) in the running construction
    while len(v) > 1:
        total = math.fsum(p)
        p_max = p[-1] / total
        p_max_root = -math.expm1(math.log1p(-p_max) / k)
        out.append((v[-1], remaining * p_max_root))
        remaining *= 1.0 - p_max_root
        v.pop()
        p.pop()
    out.append((v[0], remaining))
    return from_pairs(out[::-1])


def dilate(d: FiniteDist, a: float, b: float) -> FiniteDist:
    """Mean-preserving spread of the mass in [a, b] onto the endpoints a and b."""
    if not (0 <= a < b):
        raise DistributionError("dilate needs 0 <= a < b")
    v, p = d.support, d.probs
    inside = (v >= a) & (v <= b)
    if not np.any(inside):
        return d
    vi, pi = v[inside], p[inside]
    to_a = math.fsum(pi * (b - vi)) / (b - a)
    to_b = math.fsum(pi * (vi - a)) / (b - a)
    return FiniteDist(np.concatenate([v[~inside], [a, b]]), np.concatenate([p[~inside], [to_a, to_b]]))


def zero_pad(d: FiniteDist, p: float) -> FiniteDist:
    """With probability p a draw from d, otherwise 0."""
    if not 0 < p <= 1:
        raise DistributionError("padding probability must lie in (0, 1]")
    if p == 1:
        return d
    return FiniteDist(np.concatenate([[0.0], d.support]), np.concatenate([[1.0 - p], p * d.probs]))


def scale(d: FiniteDist, c: float) -> FiniteDist:
    if not c > 0:
        raise DistributionError("scale factor must be positive")
    return FiniteDist(d.support * c, d.probs)


def normalize_mean(d: FiniteDist) -> FiniteDist:
    m = mean(d)
    if m <= 0:
        raise DistributionError("cannot rescale a distribution with mean zero")
    return scale(d, 1.0 / m)


# -- serialisation ---------------------------------------------------------

def to_json_dict(d: FiniteDist, **extra) -> dict:
    out = {"support": [float(x) for x in d.support], "probs": [float(x) for x in d.probs]}
    out.update(extra)
    return out


def from_json_dict(obj: dict) -> FiniteDist:
    try:
        support, probs = obj["support"], obj["probs"]
    except (KeyError, TypeError) as exc:
        raise DistributionError("distribution JSON needs 'support' and 'probs' arrays") from exc
    if not isinstance(support, list) or not isinstance(probs, list):
        raise DistributionError("'support' and 'probs' must be arrays")
    if len(support) != len(probs):
        raise DistributionError("'support' and 'probs' must have equal length")
    if any(b <= a for a, b in zip(support, support[1:])):
        raise DistributionError("'support' must be strictly ascending")
    if any(not x > 0 for x in probs):
        raise DistributionError("'probs' must be positive")
    return FiniteDist(support, probs)


def load_dist(path: str | Path) -> FiniteDist:
    """Read the JSON distribution format; ``result.adjustment`` reports the hygiene correction."""
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DistributionError(f"{path}: invalid JSON ({exc})") from exc
    return from_json_dict(obj)


def dump_dist(d: FiniteDist, path: str | Path, **extra) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_dict(d, **extra), fh, indent=2)
        fh.write("\n")


def parse_inline(text: str) -> FiniteDist:
    """Parse the quick "v:p,v:p,..." syntax."""
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            v, p = chunk.split(":")
            pairs.append((float(v), float(p)))
        except ValueError as exc:
            raise DistributionError(f"bad inline entry {chunk!r}; expected value:prob") from exc
    if not pairs:
        raise DistributionError("empty inline distribution")
    return from_pairs(pairs)


def resolve_dist(spec: str) -> FiniteDist:
    """Accept either a JSON file path or an inline spec."""
    if Path(spec).is_file():
        return load_dist(spec)
    if ":" in spec:
        return parse_inline(spec)
    raise DistributionError(f"{spec!r} is neither a file nor an inline distribution")


def random_dist(rng: np.random.Generator, max_points: int = 6, scale_to: float = 10.0,
                min_points: int = 1, integer_grid: bool = False) -> FiniteDist:
    """Random test distribution; used by tests, scripts and search restarts."""
    m = int(rng.integers(min_points, max_points + 1))
    if integer_grid:
        v = np.sort(rng.choice(np.arange(0, 4 * max_points), size=m, replace=False)).astype(float)
    else:
        v = np.sort(rng.uniform(0, scale_to, size=m))
    p = rng.dirichlet(np.ones(m))
    p = np.maximum(p, 1e-6)
    return FiniteDist(v, p / p.sum())


def pmf_on(d: FiniteDist, points: Sequence[float]) -> np.ndarray:
    """Mass of d at each of the given points (0 where absent)."""
    out = np.zeros(len(points))
    for j, x in enumerate(points):
        i = int(np.searchsorted(d.support, x))
        if i < d.size and abs(d.support[i] - x) < MERGE_TOL:
            out[j] = d.probs[i]
    return out
