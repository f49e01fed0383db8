"""Node subsampling of packet graphs.

Four samplers draw a node set ``A`` of exactly ``goal`` distinct hosts:

* ``random_walk``: walk along sent-to links from a start ``x``, going back
  to ``x`` with probability ``1 - p`` at each step.
* ``forest_fire``: burn a geometric number of unvisited destinations from
  each burning node, breadth first.
* ``breadth_first``: add whole levels of ``D(A) \\ A`` in shuffled order.
* ``random_nodes``: uniform draw without replacement.

All randomness comes from one ``numpy.random.Generator`` seeded from the
config, and graph listings are sorted, so a (graph, config) pair always
yields the same sample.
"""

from __future__ import annotations

import logging
from collections import deque
from typing import Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..config.defaults import (
    DEFAULT_GOAL,
    DEFAULT_SAMPLER,
    DEFAULT_SEED,
    FIRE_MEAN,
    WALK_CONTINUE_PROBABILITY,
    WALK_STALL_FACTOR,
)
from ..exceptions import InsufficientNodes
from ..utils.parallel import ordered_map
from .graph import PacketGraph

logger = logging.getLogger(__name__)

SamplerMethod = Literal["random_walk", "forest_fire", "breadth_first", "random_nodes"]
NodeSample = tuple[str, ...]


class SampleConfig(BaseModel):
    """How to draw one node sample."""

    model_config = ConfigDict(frozen=True)

    method: SamplerMethod = Field(default=DEFAULT_SAMPLER, description="Sampling method")
    goal: int = Field(default=DEFAULT_GOAL, ge=1, description="Nodes per sample")
    walk_continue_probability: float = Field(
        default=WALK_CONTINUE_PROBABILITY,
        gt=0.0,
        lt=1.0,
        description="Probability a random walk continues instead of returning",
    )
    fire_mean: float = Field(
        default=FIRE_MEAN, gt=0.0, description="Mean number of links burned per node"
    )
    seed: int = Field(default=DEFAULT_SEED, description="RNG seed")


class _Sample:
    """Insertion-ordered node set with fresh-start draws."""

    def __init__(self, graph: PacketGraph, rng: np.random.Generator) -> None:
        self.graph = graph
        self.rng = rng
        self.order: list[str] = []
        self.members: set[str] = set()

    def __len__(self) -> int:
        return len(self.order)

    def add(self, node: str) -> bool:
        if node in self.members:
            return False
        self.order.append(node)
        self.members.add(node)
        return True

    def fresh_start(self) -> str:
        """Random host not yet sampled; added to the sample."""
        nodes = self.graph.nodes
        while True:
            node = nodes[int(self.rng.integers(len(nodes)))]
            if node not in self.members:
                self.add(node)
                return node

    def unvisited(self, node: str) -> list[str]:
        return [d for d in self.graph.destinations(node) if d not in self.members]


def _random_walk(
    sample: _Sample, goal: int, config: SampleConfig, start: Optional[str]
) -> None:
    rng = sample.rng
    if start is None:
        origin = sample.fresh_start()
    else:
        sample.add(start)
        origin = start
    current = origin
    stale = 0
    max_stale = WALK_STALL_FACTOR * goal
    while len(sample) < goal:
        if stale >= max_stale:
            origin = sample.fresh_start()
            current = origin
            stale = 0
            continue
        destinations = sample.graph.destinations(current)
        if not destinations or rng.random() >= config.walk_continue_probability:
            current = origin
            stale += 1
            continue
        current = destinations[int(rng.integers(len(destinations)))]
        stale = 0 if sample.add(current) else stale + 1


def _forest_fire(
    sample: _Sample, goal: int, config: SampleConfig, start: Optional[str]
) -> None:
    rng = sample.rng
    p = 1.0 / (1.0 + config.fire_mean)
    if start is None:
        burning = deque([sample.fresh_start()])
    else:
        sample.add(start)
        burning = deque([start])
    while len(sample) < goal:
        if not burning:
            smouldering = [node for node in sample.order if sample.unvisited(node)]
            if smouldering:
                burning.append(smouldering[int(rng.integers(len(smouldering)))])
            else:
                burning.append(sample.fresh_start())
            continue
        current = burning.popleft()
        spread = int(rng.geometric(p)) - 1
        candidates = sample.unvisited(current)
        count = min(spread, len(candidates), goal - len(sample))
        if count <= 0:
            continue
        for i in rng.choice(len(candidates), size=count, replace=False):
            sample.add(candidates[int(i)])
            burning.append(candidates[int(i)])


def _breadth_first(
    sample: _Sample, goal: int, config: SampleConfig, start: Optional[str]
) -> None:
    rng = sample.rng
    if start is None:
        frontier = [sample.fresh_start()]
    else:
        sample.add(start)
        frontier = [start]
    while len(sample) < goal:
        level = sorted({d for node in frontier for d in sample.unvisited(node)})
        if not level:
            frontier = [sample.fresh_start()]
            continue
        shuffled = [level[int(i)] for i in rng.permutation(len(level))]
        frontier = shuffled[: goal - len(sample)]
        for node in frontier:
            sample.add(node)


def _random_nodes(
    sample: _Sample, goal: int, config: SampleConfig, start: Optional[str]
) -> None:
    nodes = sample.graph.nodes
    if start is not None:
        sample.add(start)
    while len(sample) < goal:
        for i in sample.rng.choice(len(nodes), size=goal - len(sample), replace=False):
            sample.add(nodes[int(i)])


_SAMPLERS: dict[str, Callable[[_Sample, int, SampleConfig, Optional[str]], None]] = {
    "random_walk": _random_walk,
    "forest_fire": _forest_fire,
    "breadth_first": _breadth_first,
    "random_nodes": _random_nodes,
}


def sample_nodes(
    graph: PacketGraph, config: SampleConfig, start: Optional[str] = None
) -> NodeSample:
    """Draw ``config.goal`` distinct hosts from ``graph``.

    Args:
        graph: The packet graph.
        config: Sampler, goal and seed.
        start: Optional start host instead of a random one.

    Returns:
        The sampled hosts in the order they were added.

    Raises:
        InsufficientNodes: If the graph has fewer hosts than ``config.goal``.
    """
    if len(graph) < config.goal:
        raise InsufficientNodes(
            f"Cannot sample {config.goal} nodes from a graph of {len(graph)}"
        )
    if start is not None and start not in graph:
        raise ValueError(f"Start node {start!r} is not in the graph")
    sample = _Sample(graph, np.random.default_rng(config.seed))
    _SAMPLERS[config.method](sample, config.goal, config, start)
    return tuple(sample.order)


def replicate_samples(
    graph: PacketGraph, config: SampleConfig, count: int, workers: int = 1
) -> list[NodeSample]:
    """Draw ``count`` samples with seeds ``config.seed + i``.

    Raises:
        InsufficientNodes: If the graph has fewer hosts than ``config.goal``.
    """
    if len(graph) < config.goal:
        raise InsufficientNodes(
            f"Cannot sample {config.goal} nodes from a graph of {len(graph)}"
        )
    configs = [config.model_copy(update={"seed": config.seed + i}) for i in range(count)]
    samples = ordered_map(lambda c: sample_nodes(graph, c), configs, workers)
    logger.info(f"Drew {count} {config.method} samples of {config.goal} nodes")
    return samples
