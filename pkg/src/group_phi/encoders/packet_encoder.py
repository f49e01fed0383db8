"""
Packet-trace encoder.

A host is active in a time bin when it sent at least one packet during
that bin; receiving does not count.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence, Set
from typing import Any, Optional, Union

import numpy as np
import pandas as pd

from ..core.state import StateMatrix, make_state_matrix
from ..exceptions import DuplicateLabel, EmptyNodeSet, InputFormatError, NonPositiveDelta
from .base_encoder import BaseEncoder, PathLike
from .models import PacketRecord

logger = logging.getLogger(__name__)

PACKET_COLUMNS = ["timestamp_us", "src", "dst"]

PacketInput = Union[pd.DataFrame, Iterable[PacketRecord], Iterable[tuple[int, str, str]]]


def packets_frame(packets: PacketInput) -> pd.DataFrame:
    """Normalize packets to a frame with int64 ``timestamp_us`` and str ids.

    Raises:
        InputFormatError: If a frame lacks one of the packet columns.
    """
    if isinstance(packets, pd.DataFrame):
        missing = [c for c in PACKET_COLUMNS if c not in packets.columns]
        if missing:
            raise InputFormatError(f"Packet frame is missing columns {missing}")
        frame = packets[PACKET_COLUMNS]
    else:
        frame = pd.DataFrame(list(packets), columns=PACKET_COLUMNS)
    return pd.DataFrame(
        {
            "timestamp_us": frame["timestamp_us"].astype(np.int64),
            "src": frame["src"].astype(str),
            "dst": frame["dst"].astype(str),
        }
    )


def _ordered_nodes(node_set: Union[Sequence[str], Set[str]]) -> list[str]:
    if isinstance(node_set, Set):
        return sorted(str(node) for node in node_set)
    nodes = [str(node) for node in node_set]
    index = pd.Index(nodes)
    repeated = sorted(set(index[index.duplicated()]))
    if repeated:
        raise DuplicateLabel(f"Hosts listed more than once: {repeated}")
    return nodes


def encode_packets(
    packets: PacketInput,
    node_set: Union[Sequence[str], Set[str]],
    delta_ms: float,
    span_ms: float,
    origin_us: int = 0,
) -> StateMatrix:
    """Bin the sending activity of ``node_set`` into steps of ``delta_ms``.

    Row ``k`` covers ``[origin + k * delta, origin + (k + 1) * delta)``;
    there are ``ceil(span_ms / delta_ms)`` rows and packets outside them
    are ignored.

    Args:
        packets: Packet records or a frame with ``timestamp_us,src,dst``.
        node_set: Hosts to encode. A sequence keeps its order; a set is sorted.
        delta_ms: Bin width in milliseconds.
        span_ms: Total duration covered, in milliseconds.
        origin_us: Timestamp of the start of row 0, in microseconds.

    Raises:
        NonPositiveDelta: If ``delta_ms`` is not positive.
        EmptyNodeSet: If ``node_set`` is empty.
        DuplicateLabel: If a host appears twice in ``node_set``.
        TooFewSteps: If the span covers fewer than two bins.
    """
    if not delta_ms > 0:
        raise NonPositiveDelta(f"Time step must be positive, got {delta_ms} ms")
    nodes = _ordered_nodes(node_set)
    if not nodes:
        raise EmptyNodeSet("No nodes to encode")

    n_steps = math.ceil(span_ms / delta_ms)
    values = np.zeros((max(n_steps, 0), len(nodes)), dtype=np.uint8)
    frame = packets_frame(packets)
    column = pd.Series(np.arange(len(nodes)), index=pd.Index(nodes))
    sent = frame[frame["src"].isin(column.index)]
    if not sent.empty and n_steps > 0:
        offsets = sent["timestamp_us"].to_numpy(dtype=np.float64) - origin_us
        bins = np.floor(offsets / (delta_ms * 1000.0)).astype(np.int64)
        inside = (bins >= 0) & (bins < n_steps)
        columns = column.loc[sent["src"].to_numpy()].to_numpy()
        values[bins[inside], columns[inside]] = 1
        logger.debug(
            f"Binned {int(inside.sum())} of {len(sent)} sent packets into "
            f"{n_steps} x {len(nodes)} cells at {delta_ms} ms"
        )
    return make_state_matrix(values, nodes, step_duration_ms=float(delta_ms))


def packet_span(packets: pd.DataFrame) -> tuple[int, float]:
    """Earliest timestamp (us) and the span (ms) that covers every packet."""
    if packets.empty:
        return 0, 0.0
    first = int(packets["timestamp_us"].min())
    last = int(packets["timestamp_us"].max())
    return first, (last - first) / 1000.0


class PacketEncoder(BaseEncoder):
    """Encoder for packet CSVs (``timestamp_us,src,dst``)."""

    def __init__(self, config: Optional[dict[str, Any]] = None) -> None:
        super().__init__(config)
        self.encoder_name: str = "packet_encoder"
        self.required_columns: list[str] = list(PACKET_COLUMNS)

    def load(self, file_path: PathLike) -> pd.DataFrame:
        frame = self.read_table(file_path, dtype={"src": str, "dst": str})
        try:
            return packets_frame(frame)
        except (TypeError, ValueError) as e:
            raise InputFormatError(f"Invalid packet record: {e}", str(file_path)) from e

    def encode(self, records: pd.DataFrame) -> StateMatrix:
        """Encode the configured ``nodes`` (all senders when unset)."""
        if "delta_ms" not in self.config:
            raise ValueError("Packet encoding needs a time step (delta_ms)")
        delta_ms = float(self.config["delta_ms"])
        origin_us, covered_ms = packet_span(records)
        span_ms = float(self.config.get("span_ms") or covered_ms + delta_ms)
        nodes = self.config.get("nodes") or sorted(records["src"].unique())
        return encode_packets(records, nodes, delta_ms, span_ms, origin_us=origin_us)
