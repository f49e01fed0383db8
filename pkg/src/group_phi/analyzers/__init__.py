"""Analyzers package: parameter sweeps, statistics and charts"""

from .plots import plot_adjusted_series, plot_quality_levels, plot_sweep
from .statistics import (
    design_matrix,
    hardware_adjust,
    kendall_tau,
    ols_fit,
    pairwise_wilcoxon,
    pearson_r,
    quality_rank,
    treatment_contrasts,
    trend_fit,
    wilcoxon_z,
)
from .sweeps import sampled_phi, sweep_step_size, sweep_time_delay

__all__ = [
    "sweep_time_delay",
    "sweep_step_size",
    "sampled_phi",
    "pearson_r",
    "kendall_tau",
    "wilcoxon_z",
    "pairwise_wilcoxon",
    "quality_rank",
    "treatment_contrasts",
    "design_matrix",
    "ols_fit",
    "trend_fit",
    "hardware_adjust",
    "plot_sweep",
    "plot_quality_levels",
    "plot_adjusted_series",
]
