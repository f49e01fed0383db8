"""Group-phi default parameter values.

Default constants used throughout the library and the CLI.
"""

from __future__ import annotations

# Turn encoding (per-speaker volume envelopes)
DEFAULT_STEP_MS: int = 200
DEFAULT_MERGE_GAP_MS: int = 400
DEFAULT_CROSSTALK_MARGIN: float = 0.5

# Phi engine
DEFAULT_NODE_CAP: int = 16
DROP_FRACTION: float = 0.05
VALIDITY_TOLERANCE: float = 1e-9
COVARIANCE_RIDGE: float = 1e-10
# Bipartitions whose normalization is at or below this are skipped.
NORMALIZATION_FLOOR: float = 1e-12

# Node sampling
DEFAULT_SAMPLER: str = "random_walk"
WALK_CONTINUE_PROBABILITY: float = 0.85
FIRE_MEAN: float = 2.3
DEFAULT_GOAL: int = 100
DEFAULT_REPLICATES: int = 100
DEFAULT_SEED: int = 0
# Consecutive walk steps without a new node before a fresh start, per goal node.
WALK_STALL_FACTOR: int = 10

# Sweeps
DEFAULT_TAU_GRID: tuple[int, ...] = tuple(range(1, 31))
DEFAULT_DELTA_GRID_MS: tuple[float, ...] = (10, 25, 50, 100, 150, 200, 500, 1000)
# Study 3 fixes the time delay at one step.
PACKET_TAU: int = 1

# Wikipedia edit windows
QUALITY_LEVELS: tuple[str, ...] = ("C", "B", "GA", "A", "FA")
REFERENCE_QUALITY: str = "C"
WINDOW_DAYS: tuple[int, ...] = (30, 60, 90)
MIN_WINDOW_EDITORS: int = 3

# Hardware change in the packet captures
DEFAULT_BREAK_DATE: str = "2012-03-01"

PHI_METHODS: tuple[str, ...] = ("empirical", "autoregressive", "atomic")
SAMPLER_METHODS: tuple[str, ...] = (
    "random_walk",
    "forest_fire",
    "breadth_first",
    "random_nodes",
)
