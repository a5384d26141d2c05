"""Numerical search for hard ("near-extremal") distributions and alpha_k estimates.

The search minimises V_k / E_k over distributions with an atom at 0 and a
fixed number of further support points.  Values are parameterised by the logs
of consecutive gaps (after pinning v_1 = 1, which costs nothing because the
ratio is scale invariant) and probabilities by a softmax.  Nelder-Mead does
the descent; support sizes grow 2, 4, 8, ... with each size warm-started from
the previous witness.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .dist_core import (DistributionError, FiniteDist, cdf_power, from_json_dict, normalize_mean, point_mass,
                        to_json_dict, zero_pad)
from .stopping_dp import competitive_ratio, fast_ratio

log = logging.getLogger(__name__)

ALPHA = 0.745  # limiting i.i.d. ratio, used only as a labelled reference constant
SEARCH, IMPORTED, PAPER_CONSTANT = "search", "imported", "paper-constant"
IMPORT_TOL = 1e-6


class ImportRejected(DistributionError):
    pass


@dataclass(frozen=True)
class SearchBudget:
    max_support: int = 16
    restarts: int = 3
    iters_per_param: int = 600
    tol: float = 1e-4
    seed: int = 0


BUDGETS = {
    "quick": SearchBudget(max_support=8, restarts=2, iters_per_param=300),
    "default": SearchBudget(),
    "thorough": SearchBudget(max_support=32, restarts=4, iters_per_param=1000),
}


@dataclass(frozen=True)
class AlphaEntry:
    k: int
    alpha: float
    witness: FiniteDist
    provenance: str
    meta: dict = field(default_factory=dict, compare=False)


class AlphaTable:
    """alpha_k estimates keyed by k, each with its witness and provenance."""

    def __init__(self, entries=()):
        self._entries: dict[int, AlphaEntry] = {}
        for e in entries:
            self.add(e)

    def add(self, entry: AlphaEntry) -> None:
        if not 0.744 <= entry.alpha <= 1.0 + 1e-12 and entry.provenance != PAPER_CONSTANT:
            log.warning("alpha estimate %.6f for k=%d outside [0.744, 1]", entry.alpha, entry.k)
        old = self._entries.get(entry.k)
        if old is None or entry.alpha < old.alpha:
            self._entries[entry.k] = entry

    def get(self, k: int) -> AlphaEntry | None:
        return self._entries.get(k)

    def __contains__(self, k: int) -> bool:
        return k in self._entries

    def __iter__(self):
        return iter(sorted(self._entries.values(), key=lambda e: e.k))

    def __len__(self):
        return len(self._entries)

    @property
    def ks(self) -> list[int]:
        return sorted(self._entries)

    @classmethod
    def paper_constant(cls, ks) -> "AlphaTable":
        """Every k mapped to the limiting constant 0.745 (labelled, no witness search)."""
        return cls(AlphaEntry(k, 1.0 if k == 1 else ALPHA, point_mass(1.0), PAPER_CONSTANT) for k in ks)

    @classmethod
    def from_dir(cls, path: str | Path) -> "AlphaTable":
        return cls(import_hard(p) for p in sorted(Path(path).glob("*.json")))

    def save_dir(self, path: str | Path) -> None:
        Path(path).mkdir(parents=True, exist_ok=True)
        for e in self:
            if e.provenance != PAPER_CONSTANT:
                save_witness(e, Path(path) / f"hard_k{e.k:05d}.json")


# -- parameterisation -------------------------------------------------------

def _unpack(x: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    gaps = np.exp(np.clip(x[:m - 2], -30.0, 30.0))
    v = np.concatenate([[0.0, 1.0], 1.0 + np.cumsum(gaps)])
    phi = x[m - 2:]
    e = np.exp(phi - phi.max())
    return v, e / e.sum()


def _pack(d: FiniteDist) -> np.ndarray:
    v, p = np.array(d.support), np.array(d.probs)
    if v[0] > 0:
        v = np.concatenate([[0.0], v])
        p = np.concatenate([[1e-6], p])
    v = v / v[1]
    return np.concatenate([np.log(np.diff(v[1:])), np.log(p)])


def _objective(x: np.ndarray, m: int, k: int) -> float:
    v, p = _unpack(x, m)
    if not (np.all(np.isfinite(v)) and np.all(p > 0)):
        return 2.0
    r = fast_ratio(v, p, k)
    return r if math.isfinite(r) else 2.0


def structured_start(k: int, m: int) -> FiniteDist:
    """Atom at 0, a point at 1 and a geometric upper tail with geometric masses."""
    if m == 2:
        return FiniteDist([0.0, 1.0], [0.5, 0.5])
    vals = np.concatenate([[0.0, 1.0], np.geomspace(1.5, 10.0 * math.sqrt(k) + 3.0, m - 2)])
    tail = np.geomspace(1.0, 1e-3, m - 1)
    nonzero = min(0.9, 3.0 / k)
    return FiniteDist(vals, np.concatenate([[1.0 - nonzero], nonzero * tail / tail.sum()]))


def refine(d: FiniteDist, m: int) -> FiniteDist:
    """Grow a witness to m support points by inserting geometric midpoints (and one
    point above the top), each carrying a sliver of its neighbour's mass."""
    v, p = list(d.support), list(d.probs)
    if v[0] > 0:
        v, p = [0.0] + v, [1e-6] + p
    while len(v) < m:
        gaps = [(v[i + 1] / max(v[i], 1e-12), i) for i in range(1, len(v) - 1)]
        if not gaps or len(v) == m - 1:
            v.append(v[-1] * 2.0)
            p[-1] *= 0.9
            p.append(p[-1] / 9.0)
            continue
        _, i = max(gaps)
        mid = math.sqrt(v[i] * v[i + 1])
        share = 0.05 * min(p[i], p[i + 1])
        p[i] -= share / 2
        p[i + 1] -= share / 2
        v.insert(i + 1, mid)
        p.insert(i + 1, share)
    pa = np.array(p)
    return FiniteDist(v, pa / pa.sum())


def _nelder_mead(x0, m, k, iters):
    res = minimize(_objective, x0, args=(m, k), method="Nelder-Mead",
                   options={"maxfev": iters, "xatol": 1e-10, "fatol": 1e-13, "adaptive": True})
    return res.x, float(res.fun)


def _lex_key(d: FiniteDist):
    return tuple(d.support.tolist())


def search_hard(k: int, support_size: int, restarts: int = 3, iters: int | None = None, seed: int = 0,
                start: FiniteDist | Sequence[FiniteDist] | None = None) -> tuple[FiniteDist, float]:
    """Locally minimise the k-sample competitive ratio over mean-1 laws with the given support size.

    ``start`` may be one warm start or several; starts with more than
    ``support_size`` points are skipped. Returns the witness (scaled to mean 1)
    and its ratio recomputed by the exact recursion.
    """
    if support_size < 2:
        raise ValueError("support_size must be at least 2")
    if k == 1:
        return point_mass(1.0), 1.0
    m = support_size
    iters = iters or 600 * (2 * m - 3)
    rng = np.random.default_rng([seed, k, m])
    starts = [] if start is None else [start] if isinstance(start, FiniteDist) else list(start)
    candidates = []
    for s in starts:
        size = s.size + (s.support[0] > 0)
        if size < m:
            candidates.append(refine(s, m))
        elif size == m:
            candidates.append(s)
    candidates.append(structured_start(k, m))
    best_x, best_f = None, math.inf
    for c in candidates:
        x = _pack(c)
        if x.size != 2 * m - 2:
            continue
        # polish each start by restarting the simplex at its own optimum,
        # then try one random perturbation of the result
        for r in range(max(1, restarts)):
            x, f = _nelder_mead(x, m, k, iters)
            if f < best_f:
                best_x, best_f = x, f
        x, f = _nelder_mead(x + rng.normal(scale=0.3, size=x.size), m, k, iters)
        if f < best_f:
            best_x, best_f = x, f
    v, p = _unpack(best_x, m)
    witness = normalize_mean(FiniteDist(v, p))
    return witness, competitive_ratio(witness, k)


def alpha_estimate(k: int, budget: SearchBudget | str = "default", start: FiniteDist | None = None) -> AlphaEntry:
    """Best ratio over growing support sizes 2, 4, 8, ... until the gain drops below budget.tol."""
    if k < 1:
        raise ValueError("k must be positive")
    if isinstance(budget, str):
        budget = BUDGETS[budget]
    if k == 1:
        return AlphaEntry(1, 1.0, point_mass(1.0), SEARCH, {"support_size": 1})
    best_d, best_r = None, math.inf
    prev = math.inf
    m = 2
    trace = []
    if start is not None:
        # a warm start is the incumbent; begin at the first size that can hold it
        best_d, best_r = normalize_mean(start), competitive_ratio(start, k)
        size = start.size + (start.support[0] > 0)
        while m < min(size, budget.max_support):
            m *= 2
    while m <= budget.max_support:
        starts = [best_d] if best_d is not None else []
        d, r = search_hard(k, m, restarts=budget.restarts, iters=budget.iters_per_param * (2 * m - 3),
                           seed=budget.seed, start=starts)
        trace.append((m, r))
        log.info("k=%d support=%d ratio=%.7f", k, m, r)
        if r < best_r or (r == best_r and _lex_key(d) < _lex_key(best_d)):
            best_d, best_r = d, r
        if m >= 4 and prev - best_r < budget.tol:
            break
        prev = best_r
        m *= 2
    return AlphaEntry(k, best_r, best_d, SEARCH, {"trace": trace, "seed": budget.seed})


def build_alpha_table(ks, budget: SearchBudget | str = "default") -> AlphaTable:
    """Estimates for every k, warm-starting each from the previous witness by a CDF power."""
    table = AlphaTable()
    prev: AlphaEntry | None = None
    for k in sorted(set(ks)):
        start = None
        if prev is not None and prev.k > 1:
            start = cdf_power(prev.witness, prev.k / k)
        entry = alpha_estimate(k, budget, start=start)
        table.add(entry)
        prev = entry
    return table


# -- witness files ----------------------------------------------------------

def save_witness(entry: AlphaEntry, path: str | Path) -> None:
    obj = to_json_dict(entry.witness, k=entry.k, ratio=entry.alpha, source=entry.provenance)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def import_hard(path: str | Path) -> AlphaEntry:
    """Load a witness file, recompute its ratio and reject it if the claim is off by more than 1e-6."""
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ImportRejected(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(obj.get("k"), int) or obj["k"] < 1:
        raise ImportRejected(f"{path}: witness needs an integer field 'k' >= 1")
    d = from_json_dict(obj)
    k = obj["k"]
    actual = competitive_ratio(d, k)
    claimed = obj.get("ratio")
    if claimed is not None and abs(float(claimed) - actual) > IMPORT_TOL:
        raise ImportRejected(f"{path}: claimed ratio {claimed} but the distribution gives {actual:.9f} at k={k}")
    return AlphaEntry(k, actual, d, IMPORTED, {"path": str(path), "source": obj.get("source")})


def zero_pad_ratio(entry: AlphaEntry, n: int) -> float:
    """Ratio of the zero-padded witness at horizon n with n p = k."""
    p = entry.k / n
    return competitive_ratio(zero_pad(entry.witness, p), n)
