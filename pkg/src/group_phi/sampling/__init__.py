"""Packet graphs and node subsampling"""

from .graph import PacketGraph, build_packet_graph
from .samplers import SampleConfig, replicate_samples, sample_nodes

__all__ = [
    "PacketGraph",
    "SampleConfig",
    "build_packet_graph",
    "replicate_samples",
    "sample_nodes",
]
