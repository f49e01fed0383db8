"""
Chat-log encoder for online sessions.

Every chat line is one time step in which only its author is active.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Any, Optional, Union

import numpy as np

from ..core.state import StateMatrix, make_state_matrix
from ..exceptions import InputFormatError, TooFewLines, UnknownSpeaker
from .base_encoder import BaseEncoder, PathLike
from .models import ChatLine

logger = logging.getLogger(__name__)

LineInput = Union[ChatLine, tuple[str, str]]


def _speaker(line: LineInput) -> str:
    if isinstance(line, ChatLine):
        return line.speaker
    return str(line[0])


def encode_chat(lines: Sequence[LineInput], roster: Sequence[str]) -> StateMatrix:
    """Encode chat lines as one-hot rows over the full roster.

    Members who never write keep an all-zero column.

    Args:
        lines: Chat lines in order, as :class:`ChatLine` or ``(speaker, text)``.
        roster: Every group member; fixes the column order.

    Raises:
        TooFewLines: If there are fewer than two lines.
        UnknownSpeaker: If a line's author is not on the roster.
    """
    if len(lines) < 2:
        raise TooFewLines(f"A chat needs at least 2 lines, got {len(lines)}")
    members = [str(member) for member in roster]
    column = {member: i for i, member in enumerate(members)}
    values = np.zeros((len(lines), len(members)), dtype=np.uint8)
    for step, line in enumerate(lines):
        speaker = _speaker(line)
        if speaker not in column:
            raise UnknownSpeaker(f"Line {step} is by {speaker!r}, who is not on the roster")
        values[step, column[speaker]] = 1
    return make_state_matrix(values, members)


class ChatEncoder(BaseEncoder):
    """Encoder for chat CSVs (``line_index,speaker,text``).

    The roster comes from ``config["roster"]`` when given, otherwise from
    the speakers in order of their first line.
    """

    def __init__(self, config: Optional[dict[str, Any]] = None) -> None:
        super().__init__(config)
        self.encoder_name: str = "chat_encoder"
        self.required_columns: list[str] = ["line_index", "speaker", "text"]

    def load(self, file_path: PathLike) -> list[ChatLine]:
        frame = self.read_table(
            file_path, dtype={"speaker": str, "text": str}, keep_default_na=False
        )
        try:
            frame = frame.sort_values("line_index", kind="stable")
        except TypeError as e:
            raise InputFormatError(f"Bad line_index column: {e}", str(file_path)) from e
        return [
            ChatLine(speaker=speaker, text=text)
            for speaker, text in zip(frame["speaker"], frame["text"])
        ]

    def roster_for(self, lines: Sequence[ChatLine]) -> list[str]:
        roster = self.config.get("roster")
        if roster:
            return [str(member) for member in roster]
        return list(dict.fromkeys(line.speaker for line in lines))

    def encode(self, records: Sequence[ChatLine]) -> StateMatrix:
        return encode_chat(records, self.roster_for(records))
