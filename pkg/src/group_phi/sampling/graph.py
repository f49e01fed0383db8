"""Directed communication graph built from packet records."""

from __future__ import annotations

import logging
import networkx as nx
import pandas as pd

from ..encoders.packet_encoder import PacketInput, packets_frame

logger = logging.getLogger(__name__)


class PacketGraph:
    """Hosts ``S`` and, per host ``a``, the set ``D(a)`` it sent packets to.

    Wraps a :class:`networkx.DiGraph` with an edge ``a -> b`` for every
    distinct sender/destination pair. Node and destination listings are
    sorted so that seeded samplers are reproducible.
    """

    def __init__(self, graph: nx.DiGraph) -> None:
        self._graph = graph
        self._nodes: tuple[str, ...] = tuple(sorted(graph.nodes))
        self._destinations: dict[str, tuple[str, ...]] = {
            node: tuple(sorted(graph.successors(node))) for node in self._nodes
        }

    @property
    def nodes(self) -> tuple[str, ...]:
        """All hosts, sorted."""
        return self._nodes

    def destinations(self, node: str) -> tuple[str, ...]:
        """D(node), sorted; empty for hosts that only receive."""
        return self._destinations[node]

    def to_networkx(self) -> nx.DiGraph:
        return self._graph.copy()

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, node: object) -> bool:
        return node in self._destinations


def build_packet_graph(packets: PacketInput) -> PacketGraph:
    """Build the graph from ``(timestamp_us, src, dst)`` records.

    ``S`` is every source and destination; ``D(a)`` the distinct
    destinations of ``a``. Empty input gives an empty graph.
    """
    frame = packets_frame(packets)
    graph = nx.DiGraph()
    graph.add_nodes_from(pd.unique(pd.concat([frame["src"], frame["dst"]])))
    pairs = frame[["src", "dst"]].drop_duplicates()
    graph.add_edges_from(zip(pairs["src"], pairs["dst"]))
    logger.debug(
        f"Packet graph: {graph.number_of_nodes()} hosts, "
        f"{graph.number_of_edges()} directed links from {len(frame)} packets"
    )
    return PacketGraph(graph)
