"""Sequential-game simulator: standard, batched and windowed presentation."""
from .experiments import (CollisionObserver, GapReport, PaddingReport, noniid_demo, noniid_sequence,
                          padding_experiment, prophet_exact, window_gap_exact, window_vs_batch,
                          windowed_value_exact)
from .game import (BATCHED, STANDARD, WINDOWED, BlockResult, ContractViolation, GameSetting, Outcome, TrajectoryStreams,
                   ViewState, draw_block, draw_trajectory, play, play_values, trajectory_rng)
from .montecarlo import McEstimate, SimResult, monte_carlo, simulate, simulate_paired
from .policies import (BatchFromWindow, BatchPolicy, Policy, ThresholdPolicy, UniformOffset, WindowAlgoA,
                       WindowMaxPolicy, batch_from_window, batch_policy, threshold_policy,
                       uniform_offset_wrapper, window_algo_A, window_algo_A_prime)

__all__ = [
    "BATCHED", "STANDARD", "WINDOWED", "BatchFromWindow", "BatchPolicy", "BlockResult", "CollisionObserver",
    "ContractViolation", "GameSetting", "GapReport", "McEstimate", "Outcome", "PaddingReport", "Policy",
    "SimResult", "ThresholdPolicy", "TrajectoryStreams", "UniformOffset", "ViewState", "WindowAlgoA", "WindowMaxPolicy",
    "batch_from_window", "batch_policy", "draw_block", "draw_trajectory", "monte_carlo", "noniid_demo",
    "noniid_sequence", "padding_experiment", "play", "play_values", "prophet_exact", "simulate",
    "simulate_paired", "threshold_policy", "trajectory_rng", "uniform_offset_wrapper", "window_algo_A",
    "window_algo_A_prime", "window_gap_exact", "window_vs_batch", "windowed_value_exact",
]
