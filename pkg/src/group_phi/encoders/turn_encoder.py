"""
Speaking-turn encoder for face-to-face sessions.

Each group member's microphone yields a volume envelope sampled at a fixed
step (200 ms by default). A speaker is active in a step when their volume
reaches the threshold; quieter pickups of someone else's speech are
suppressed, and short pauses inside a turn are bridged.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Any, Optional

import numpy as np
import numpy.typing as npt

from ..config.defaults import (
    DEFAULT_CROSSTALK_MARGIN,
    DEFAULT_MERGE_GAP_MS,
    DEFAULT_STEP_MS,
)
from ..core.state import StateMatrix, make_state_matrix
from ..exceptions import InputFormatError, MisalignedTracks, NonPositiveThreshold
from .base_encoder import BaseEncoder, PathLike
from .models import VolumeTrack

logger = logging.getLogger(__name__)


def fill_short_gaps(active: npt.NDArray[np.bool_], max_gap: int) -> npt.NDArray[np.bool_]:
    """Fill runs of at most ``max_gap`` inactive steps between active steps.

    Leading and trailing silences are left alone.
    """
    filled = active.copy()
    if max_gap <= 0:
        return filled
    for column in range(active.shape[1]):
        on = np.flatnonzero(active[:, column])
        if on.size < 2:
            continue
        gaps = np.diff(on) - 1
        for start, gap in zip(on[:-1], gaps):
            if 0 < gap <= max_gap:
                filled[start + 1 : start + 1 + gap, column] = True
    return filled


def encode_turns(
    tracks: Sequence[VolumeTrack],
    threshold: float,
    step_ms: int = DEFAULT_STEP_MS,
    merge_gap_ms: int = DEFAULT_MERGE_GAP_MS,
    crosstalk_margin: float = DEFAULT_CROSSTALK_MARGIN,
) -> StateMatrix:
    """Encode time-aligned volume tracks as a speaking-turn matrix.

    Args:
        tracks: One track per speaker, all of the same length and step.
        threshold: Minimum volume for a speaker to count as talking.
        step_ms: Step duration the tracks are sampled at.
        merge_gap_ms: Pauses of at most this long inside a turn are filled.
        crosstalk_margin: When several speakers are active in a step, those
            below this fraction of the loudest are set inactive.

    Returns:
        A T x N matrix with one column per speaker.

    Raises:
        NonPositiveThreshold: If ``threshold`` is not positive.
        MisalignedTracks: If tracks differ in length or step duration.
    """
    if not threshold > 0:
        raise NonPositiveThreshold(f"Volume threshold must be positive, got {threshold}")
    if not tracks:
        raise MisalignedTracks("No volume tracks given")
    lengths = {len(track.samples) for track in tracks}
    if len(lengths) > 1:
        raise MisalignedTracks(f"Tracks differ in length: {sorted(lengths)}")
    steps = {track.step_ms for track in tracks}
    if steps != {step_ms}:
        raise MisalignedTracks(
            f"Tracks are sampled at {sorted(steps)} ms, expected {step_ms} ms"
        )

    volumes = np.column_stack([np.asarray(t.samples, dtype=np.float64) for t in tracks])
    active = volumes >= threshold

    overlapping = active.sum(axis=1) > 1
    loudest = volumes.max(axis=1, keepdims=True)
    crosstalk = active & overlapping[:, None] & (volumes < crosstalk_margin * loudest)
    if crosstalk.any():
        logger.debug(f"Suppressed {int(crosstalk.sum())} crosstalk cells")
    active &= ~crosstalk

    active = fill_short_gaps(active, merge_gap_ms // step_ms)
    return make_state_matrix(
        active.astype(np.uint8),
        [track.speaker for track in tracks],
        step_duration_ms=float(step_ms),
    )


class TurnEncoder(BaseEncoder):
    """Encoder for per-speaker volume CSVs (``step,<speaker1>,...``)."""

    def __init__(self, config: Optional[dict[str, Any]] = None) -> None:
        super().__init__(config)
        self.encoder_name: str = "turn_encoder"
        self.required_columns: list[str] = ["step"]

    def load(self, file_path: PathLike) -> list[VolumeTrack]:
        frame = self.read_table(file_path)
        speakers = [c for c in frame.columns if c != "step"]
        if not speakers:
            raise InputFormatError("Volume file has no speaker columns", str(file_path))
        step_ms = int(self.config.get("step_ms", DEFAULT_STEP_MS))
        try:
            frame = frame.sort_values("step")
            return [
                VolumeTrack(
                    speaker=str(speaker),
                    samples=frame[speaker].astype(float).tolist(),
                    step_ms=step_ms,
                )
                for speaker in speakers
            ]
        except ValueError as e:
            raise InputFormatError(f"Invalid volume data: {e}", str(file_path)) from e

    def encode(self, records: Sequence[VolumeTrack]) -> StateMatrix:
        if "threshold" not in self.config:
            raise ValueError("Turn encoding needs a volume threshold")
        return encode_turns(
            records,
            threshold=float(self.config["threshold"]),
            step_ms=int(self.config.get("step_ms", DEFAULT_STEP_MS)),
            merge_gap_ms=int(self.config.get("merge_gap_ms", DEFAULT_MERGE_GAP_MS)),
            crosstalk_margin=float(
                self.config.get("crosstalk_margin", DEFAULT_CROSSTALK_MARGIN)
            ),
        )
