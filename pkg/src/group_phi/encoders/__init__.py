"""Encoders package: event logs to state matrices"""

from .base_encoder import BaseEncoder
from .chat_encoder import ChatEncoder, encode_chat
from .edit_encoder import (
    EditEncoder,
    encode_edits,
    extract_quality_windows,
    filter_outlier_articles,
)
from .packet_encoder import PacketEncoder, encode_packets, packets_frame
from .turn_encoder import TurnEncoder, encode_turns

__all__ = [
    "BaseEncoder",
    "TurnEncoder",
    "ChatEncoder",
    "EditEncoder",
    "PacketEncoder",
    "encode_turns",
    "encode_chat",
    "extract_quality_windows",
    "filter_outlier_articles",
    "encode_edits",
    "encode_packets",
    "packets_frame",
]
