"""Evaluators for the windowed-game bounds: the window-over-batch gap and the
two upper bounds on the ratio achievable with windows of size n/k."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .dist_core import FiniteDist, cdf_power, quantile_upper
from .hardsearch import AlphaTable
from .stopping_dp import acceptance_probs, build_table, prophet_value

DEFAULT_DELTA = 1e-4
READINGS = ("threshold", "support")


@dataclass(frozen=True)
class BoundReport:
    k: int
    lower: float | None           # alpha_k estimate, when the table has one
    lower_provenance: str | None
    l: int                        # l minimising the reported upper bound
    alpha_l: float
    alpha_provenance: str
    delta_gap: float | None
    clean_bound: float
    clean_l: int
    tight_bound: float | None
    tight_l: int | None

    @property
    def upper(self) -> float:
        """The better of the two upper bounds (both hold)."""
        if self.tight_bound is None:
            return self.clean_bound
        return min(self.tight_bound, self.clean_bound)

    @property
    def vacuous(self) -> bool:
        return self.upper > 1.0


# -- window-over-batch gap ----------------------------------------------------

def _pair_gap(d: FiniteDist, floor: float) -> float:
    """E[max - min] of two i.i.d. draws conditioned on both being strictly above floor."""
    keep = d.support > floor
    v, p = d.support[keep], d.probs[keep]
    if v.size < 2:
        return 0.0
    p = p / p.sum()
    diff = np.abs(v[:, None] - v[None, :])
    return float(p @ diff @ p)


def delta_gap(d_batchmax: FiniteDist, k: int) -> float:
    """Guaranteed advantage of the window algorithm over the optimal k-batch rule.

    Sum over the first k-1 batches of q_i^2/4 times the expected spread of two
    exceedances of the i-th threshold, weighted by the chance of reaching batch i.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    q = acceptance_probs(d_batchmax, k)
    total, reach = [], 1.0
    for i in range(k - 1):
        if q[i] > 0:
            floor = quantile_upper(d_batchmax, q[i])
            total.append(0.25 * q[i] ** 2 * _pair_gap(d_batchmax, floor) * reach)
        reach *= 1.0 - q[i]
        if reach == 0.0:
            break
    return math.fsum(total)


# -- upper bounds ---------------------------------------------------------------

def clean_upper_bound(k: int, l: int | None, alpha_l: float) -> float:
    """alpha_l + (l-1)/(l-1.35) * (1 - (0.35/(l-1))^(l/k)); l defaults to round(sqrt(k))."""
    if l is None:
        l = round(math.sqrt(k))
    if l < 2:
        raise ValueError(f"l must be at least 2 (got {l})")
    if l > k:
        raise ValueError(f"l must not exceed k (got l={l}, k={k})")
    return alpha_l + (l - 1) / (l - 1.35) * -math.expm1(l / k * math.log(0.35 / (l - 1)))


def _delta_term(alpha_l: float, delta: float) -> float:
    if alpha_l * delta >= 1:
        raise ValueError("alpha_l * delta must be below 1")
    return delta * alpha_l ** 2 / (1 - delta * alpha_l)


def _expected_max_with_tail_above(support, G, head_power, c_cdf) -> float:
    """E[M 1{T > c}] where M = max(head, T), T has CDF G on support and head CDF G^head_power.

    c enters only through its CDF value c_cdf = P(T <= c)."""
    H = G ** head_power
    joint = H * np.maximum(G - c_cdf, 0.0)          # P(M <= v_i, c < T <= v_i)
    mass = np.diff(np.concatenate([[0.0], joint]))
    return math.fsum(support * mass)


def tight_upper_bound(d_prime: FiniteDist, l: int, k: int, alpha_l: float, delta: float = DEFAULT_DELTA,
                      reading: str = "threshold") -> float:
    """Refined upper bound built from the per-window maximum law d_prime.

    d_prime is the law of the maximum of one window (n/k samples); a batch of
    the l-batch problem spans k/l windows, so its maximum has law d_prime^(k/l).
    The failure event for the j-th to last batch is that its final window holds
    a value strictly above the continuation threshold V_{j-2} of that batch
    problem (V_{-1} = V_0 = 0).

    reading="support" evaluates the printed double sum literally instead:
    s_i is the CDF at the i-th support point, s_0 = s_{-1} = 0, the head of the
    batch is k-1 copies of d_prime and the product runs over s_{f-1}, f = j+1..l.
    """
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {READINGS}")
    if not 2 <= l <= k:
        raise ValueError("need 2 <= l <= k")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    term = _delta_term(alpha_l, delta)
    batch = cdf_power(d_prime, k / l)
    E_l = prophet_value(batch, l)
    if E_l <= 0:
        raise ValueError("prophet value zero")
    v, G = d_prime.support, np.minimum(d_prime.cdf_values, 1.0)
    if reading == "threshold":
        # thresholds[i] = V_{l-1-i}; prepend V_{-1} = 0
        V = np.concatenate([[0.0], build_table(batch, l).thresholds[::-1]])    # V[i + 1] = V_i
        cdf_at = np.concatenate([[0.0], G])[np.searchsorted(v, V, side="right")]
        no_fail = lambda f: cdf_at[f - 1]                                       # P(T <= V_{f-2})
        c_of = lambda j: cdf_at[j - 1]
        head = k / l - 1
    else:
        s = lambda i: 0.0 if i <= 0 else (1.0 if i > v.size else float(G[i - 1]))
        no_fail = lambda f: s(f - 1)
        c_of = lambda j: s(j - 2)
        head = k - 1
    terms = []
    for j in range(1, l + 1):
        prod = math.prod(no_fail(f) for f in range(j + 1, l + 1))
        if prod == 0.0:
            continue
        terms.append(_expected_max_with_tail_above(v, G, head, c_of(j)) * prod)
    return alpha_l + term + math.fsum(terms) / E_l


# -- sweep -------------------------------------------------------------------------

def bound_sweep(k_list: Sequence[int], alpha_table: AlphaTable,
                hard_dists: Mapping[int, FiniteDist] | None = None, delta: float = DEFAULT_DELTA,
                reading: str = "threshold") -> list[BoundReport]:
    """One report per k, with l chosen to minimise each bound over the table's admissible l.

    hard_dists maps l to the hard distribution of the l-sample problem (the law of a
    batch maximum); by default every witness in alpha_table is used.
    """
    if hard_dists is None:
        hard_dists = {e.k: e.witness for e in alpha_table if e.provenance != "paper-constant"}
    rows = []
    for k in sorted(set(k_list)):
        ls = [l for l in alpha_table.ks if 2 <= l <= k]
        if not ls:
            raise ValueError(f"alpha table has no admissible l for k={k}")
        clean = {l: clean_upper_bound(k, l, alpha_table.get(l).alpha) for l in ls}
        clean_l = min(clean, key=clean.get)
        tight = {l: tight_upper_bound(cdf_power(hard_dists[l], l / k), l, k, alpha_table.get(l).alpha,
                                      delta, reading)
                 for l in ls if l in hard_dists}
        tight_l = min(tight, key=tight.get) if tight else None
        best_l = tight_l if tight_l is not None and tight[tight_l] < clean[clean_l] else clean_l
        own = alpha_table.get(k)
        gap = None
        if own is not None and own.provenance != "paper-constant" and k >= 2:
            gap = delta_gap(own.witness, k)
        entry = alpha_table.get(best_l)
        rows.append(BoundReport(
            k=k, lower=own.alpha if own else None, lower_provenance=own.provenance if own else None,
            l=best_l, alpha_l=entry.alpha, alpha_provenance=entry.provenance, delta_gap=gap,
            clean_bound=clean[clean_l], clean_l=clean_l,
            tight_bound=tight[tight_l] if tight_l is not None else None, tight_l=tight_l,
        ))
    return rows
