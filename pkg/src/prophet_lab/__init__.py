"""Prophet inequalities for batched and windowed i.i.d. inputs.

Exact distribution arithmetic, optimal-stopping tables, a seeded game
simulator, bound evaluators and a search for hard distributions.
"""
from .bounds import BoundReport, bound_sweep, clean_upper_bound, delta_gap, tight_upper_bound
from .dist_core import (DistributionError, FiniteDist, cdf, cdf_power, dilate, from_pairs, kth_root, load_dist,
                        max_power, mean, normalize_mean, point_mass, quantile_upper, resolve_dist, scale,
                        survival, zero_pad)
from .hardsearch import AlphaEntry, AlphaTable, alpha_estimate, import_hard, search_hard
from .stopping_dp import (StoppingTable, acceptance_probs, batch_value, build_table, competitive_ratio,
                          prophet_value)

__version__ = "0.1.0"

__all__ = [
    "AlphaEntry", "AlphaTable", "BoundReport", "DistributionError", "FiniteDist", "StoppingTable",
    "acceptance_probs", "alpha_estimate", "batch_value", "bound_sweep", "build_table", "cdf", "cdf_power",
    "clean_upper_bound", "competitive_ratio", "delta_gap", "dilate", "from_pairs", "import_hard", "kth_root",
    "load_dist", "max_power", "mean", "normalize_mean", "point_mass", "prophet_value", "quantile_upper",
    "resolve_dist", "scale", "search_hard", "survival", "tight_upper_bound", "zero_pad",
]
