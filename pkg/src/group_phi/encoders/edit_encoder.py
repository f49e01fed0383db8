"""
Wiki edit-history encoder.

Edits are grouped into windows of 30, 60 or 90 days before each change in
an article's quality class. Each edit in a window is one time step in
which only its editor is active.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterable, Sequence
from datetime import timedelta
from typing import Any, Optional

import numpy as np
import pandas as pd

from ..config.defaults import MIN_WINDOW_EDITORS, WINDOW_DAYS
from ..core.state import StateMatrix, make_state_matrix
from ..exceptions import InputFormatError, TooFewEdits, UnsortedInput
from .base_encoder import BaseEncoder, PathLike
from .models import EditRecord, QualityWindow

logger = logging.getLogger(__name__)


def extract_quality_windows(
    edits: Sequence[EditRecord], window_days: int
) -> list[QualityWindow]:
    """Cut the edit windows preceding each quality change of one article.

    A change is an edit whose ``quality_after`` is set and differs from the
    article's last known quality (the first assessment counts). The window
    is ``[change - window_days, change)``, so the changing edit itself is
    never part of it. Windows with fewer than three distinct editors are
    discarded. Windows of consecutive changes may share edits.

    Raises:
        UnsortedInput: If the edits are not in timestamp order.
        ValueError: If the edits belong to more than one article.
    """
    articles = {edit.article for edit in edits}
    if len(articles) > 1:
        raise ValueError(f"Edits span {len(articles)} articles; group them first")
    for i in range(1, len(edits)):
        if edits[i].timestamp < edits[i - 1].timestamp:
            raise UnsortedInput(
                f"Edit {i} ({edits[i].timestamp}) precedes edit {i - 1} "
                f"({edits[i - 1].timestamp})"
            )

    windows: list[QualityWindow] = []
    known_quality: Optional[str] = None
    span = timedelta(days=window_days)
    for i, edit in enumerate(edits):
        if edit.quality_after is None or edit.quality_after == known_quality:
            continue
        known_quality = edit.quality_after
        start = edit.timestamp - span
        inside = [e for e in edits[:i] if start <= e.timestamp < edit.timestamp]
        editors = {e.editor for e in inside}
        if len(editors) < MIN_WINDOW_EDITORS:
            logger.debug(
                f"{edit.article}: {window_days}-day window before {edit.timestamp} "
                f"has {len(editors)} editors, discarded"
            )
            continue
        windows.append(
            QualityWindow(
                article=edit.article,
                new_quality=edit.quality_after,
                window_days=window_days,
                change_time=edit.timestamp,
                edits=inside,
            )
        )
    return windows


def filter_outlier_articles(
    edits: Iterable[EditRecord], max_edits: int
) -> list[EditRecord]:
    """Drop every article with more than ``max_edits`` edits in total."""
    records = list(edits)
    counts = Counter(edit.article for edit in records)
    outliers = sorted(article for article, n in counts.items() if n > max_edits)
    if outliers:
        logger.warning(
            f"Removing {len(outliers)} outlier articles with more than "
            f"{max_edits} edits: {outliers}"
        )
    removed = set(outliers)
    return [edit for edit in records if edit.article not in removed]


def encode_edits(window: QualityWindow) -> StateMatrix:
    """One-hot editor rows, one per edit, editors in order of first edit.

    Raises:
        TooFewEdits: If the window holds fewer than two edits or three editors.
    """
    editors = window.editors
    if len(window.edits) < 2 or len(editors) < MIN_WINDOW_EDITORS:
        raise TooFewEdits(
            f"Window has {len(window.edits)} edits by {len(editors)} editors"
        )
    column = {editor: i for i, editor in enumerate(editors)}
    values = np.zeros((len(window.edits), len(editors)), dtype=np.uint8)
    for step, edit in enumerate(window.edits):
        values[step, column[edit.editor]] = 1
    return make_state_matrix(
        values, editors, origin_time=window.edits[0].timestamp.isoformat()
    )


def group_by_article(edits: Iterable[EditRecord]) -> dict[str, list[EditRecord]]:
    """Per-article edit lists, each sorted by timestamp (stable)."""
    grouped: dict[str, list[EditRecord]] = {}
    for edit in edits:
        grouped.setdefault(edit.article, []).append(edit)
    return {
        article: sorted(records, key=lambda e: e.timestamp)
        for article, records in sorted(grouped.items())
    }


class EditEncoder(BaseEncoder):
    """Encoder for edit logs (``timestamp_iso8601,article,editor,quality_after``)."""

    def __init__(self, config: Optional[dict[str, Any]] = None) -> None:
        super().__init__(config)
        self.encoder_name: str = "edit_encoder"
        self.required_columns: list[str] = [
            "timestamp_iso8601",
            "article",
            "editor",
            "quality_after",
        ]

    def load(self, file_path: PathLike) -> list[EditRecord]:
        frame = self.read_table(
            file_path,
            dtype={"article": str, "editor": str, "quality_after": str},
            keep_default_na=False,
        )
        try:
            stamps = pd.to_datetime(frame["timestamp_iso8601"], utc=True)
            return [
                EditRecord(
                    timestamp=stamp.to_pydatetime(),
                    editor=editor,
                    article=article,
                    quality_after=quality or None,
                )
                for stamp, article, editor, quality in zip(
                    stamps, frame["article"], frame["editor"], frame["quality_after"]
                )
            ]
        except ValueError as e:
            raise InputFormatError(f"Invalid edit record: {e}", str(file_path)) from e

    def windows(self, records: Iterable[EditRecord]) -> list[QualityWindow]:
        """Quality windows of every article, for every configured length."""
        edits = list(records)
        max_edits = self.config.get("max_edits")
        if max_edits is not None:
            edits = filter_outlier_articles(edits, int(max_edits))
        by_article = group_by_article(edits)
        window_days = self.config.get("window_days", WINDOW_DAYS)
        if isinstance(window_days, int):
            window_days = [window_days]
        windows: list[QualityWindow] = []
        for days in window_days:
            for article_edits in by_article.values():
                windows.extend(extract_quality_windows(article_edits, int(days)))
        logger.info(f"Extracted {len(windows)} quality windows")
        return windows

    def encode(self, records: Iterable[EditRecord]) -> list[tuple[QualityWindow, StateMatrix]]:
        return [(window, encode_edits(window)) for window in self.windows(records)]
