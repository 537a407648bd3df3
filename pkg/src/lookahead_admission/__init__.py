"""Admission control with lookahead for a single-server queue.

Sample paths, deletion policies (online threshold, offline no-job-left-behind,
windowed lookahead, greedy), closed-form performance, empirical estimators,
experiment sweeps and a resource-pooling simulator.
"""

from .analytics import (
    NOBModel,
    ThresholdModel,
    lookahead_window,
    nob_queue_mean,
    optimal_threshold,
    smallest_feasible_threshold,
    threshold_deletion_rate,
    threshold_queue_mean,
    threshold_steady_state,
)
from .deletion import check_feasible, multi_delete, point_delete
from .experiments import ExperimentConfig, duality_sweep, run_single, sweep
from .metrics import RunResult, time_avg_queue
from .paths import ModelParams, SamplePath, extend_path, extend_to_time, generate_initial_path
from .policies import (
    PolicySpec,
    apply_policy,
    greedy_delete,
    nob_offline,
    nob_reference,
    nob_window,
    sigma_window,
    threshold_policy,
)
from .pooling import PoolingConfig, PoolingStats, run_pooling

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig", "ModelParams", "NOBModel", "PolicySpec", "PoolingConfig", "PoolingStats",
    "RunResult", "SamplePath", "ThresholdModel", "apply_policy", "check_feasible", "duality_sweep",
    "extend_path", "extend_to_time", "generate_initial_path", "greedy_delete", "lookahead_window",
    "multi_delete", "nob_offline", "nob_queue_mean", "nob_reference", "nob_window",
    "optimal_threshold", "point_delete", "run_pooling", "run_single", "sigma_window",
    "smallest_feasible_threshold", "sweep", "threshold_deletion_rate", "threshold_policy",
    "threshold_queue_mean", "threshold_steady_state", "time_avg_queue",
]
