"""
group-phi: integrated information of groups

Computes integrated information ("phi") on binary activity matrices encoded
from group-interaction logs (speaking turns, chat lines, wiki edits, packet
traces), with bipartition search, auto-regressive and atomic estimators,
node subsampling of large packet graphs, parameter sweeps and the
statistics used to relate phi to group outcomes.
"""

__version__ = "0.1.0"

# Import main classes for library usage
from .config.run_config import RunConfig, RunConfigManager
from .core.empirical import compute_phi, minimum_information_bipartition
from .core.models import PhiResult, RegressionFit, SweepResult
from .core.stability import averaged_phi, stabilized_phi
from .core.state import Partition, StateMatrix, make_state_matrix
from .exceptions import GroupPhiError
from .sampling.graph import PacketGraph, build_packet_graph
from .sampling.samplers import SampleConfig

__all__ = [
    "StateMatrix",
    "Partition",
    "make_state_matrix",
    "PhiResult",
    "SweepResult",
    "RegressionFit",
    "compute_phi",
    "minimum_information_bipartition",
    "stabilized_phi",
    "averaged_phi",
    "PacketGraph",
    "build_packet_graph",
    "SampleConfig",
    "RunConfig",
    "RunConfigManager",
    "GroupPhiError",
    "__version__",
]
