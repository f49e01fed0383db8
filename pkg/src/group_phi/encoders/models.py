"""Pydantic models for the raw event records each encoder consumes.

Packet records are plain named tuples instead: captures run to millions
of rows and travel as pandas frames anyway.
"""

from __future__ import annotations

from datetime import datetime, timedelta
from typing import Literal, NamedTuple, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..config.defaults import DEFAULT_STEP_MS, MIN_WINDOW_EDITORS

QualityLabel = Literal["C", "B", "GA", "A", "FA"]


class VolumeTrack(BaseModel):
    """Per-step volume envelope of one speaker's microphone."""

    model_config = ConfigDict(frozen=True)

    speaker: str = Field(..., description="Speaker identifier")
    samples: list[float] = Field(..., description="Volume per step, non-negative")
    step_ms: int = Field(default=DEFAULT_STEP_MS, gt=0, description="Step duration")

    @field_validator("samples")
    @classmethod
    def _non_negative(cls, samples: list[float]) -> list[float]:
        if any(not s >= 0 for s in samples):
            raise ValueError("Volume samples must be non-negative numbers")
        return samples


class ChatLine(BaseModel):
    """One line of a text chat."""

    model_config = ConfigDict(frozen=True)

    speaker: str
    text: str = ""


class EditRecord(BaseModel):
    """One revision of a wiki article."""

    model_config = ConfigDict(frozen=True)

    timestamp: datetime = Field(..., description="Time of the edit")
    editor: str = Field(..., description="Editor identifier")
    article: str = Field(..., description="Article identifier")
    quality_after: Optional[QualityLabel] = Field(
        default=None, description="Quality class after this edit, if assessed"
    )


class QualityWindow(BaseModel):
    """The edits made to an article in the days before a quality change."""

    model_config = ConfigDict(frozen=True)

    article: str
    new_quality: QualityLabel
    window_days: int = Field(gt=0)
    change_time: datetime
    edits: list[EditRecord]

    @property
    def start_time(self) -> datetime:
        return self.change_time - timedelta(days=self.window_days)

    @property
    def editors(self) -> list[str]:
        """Distinct editors, in order of first edit."""
        return list(dict.fromkeys(edit.editor for edit in self.edits))

    @model_validator(mode="after")
    def _check_window(self) -> QualityWindow:
        start = self.start_time
        for edit in self.edits:
            if not start <= edit.timestamp < self.change_time:
                raise ValueError(
                    f"Edit at {edit.timestamp} lies outside [{start}, {self.change_time})"
                )
        if len(self.editors) < MIN_WINDOW_EDITORS:
            raise ValueError(
                f"A quality window needs at least {MIN_WINDOW_EDITORS} editors, "
                f"got {len(self.editors)}"
            )
        return self


class PacketRecord(NamedTuple):
    """A packet sent from ``src`` to ``dst`` at ``timestamp_us`` microseconds."""

    timestamp_us: int
    src: str
    dst: str
