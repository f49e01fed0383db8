"""Shared fixtures: small seeded systems and their CSV files."""

from __future__ import annotations

from pathlib import Path

import pandas as pd
import pytest

from group_phi.core.state import StateMatrix, make_state_matrix
from group_phi.utils import synthetic
from group_phi.utils.io_utils import write_state_matrix


@pytest.fixture
def copy_states() -> StateMatrix:
    """Two-node copy system, B_t = A_{t-1}."""
    return synthetic.copy_system(20_000, seed=1)


@pytest.fixture
def small_states() -> StateMatrix:
    return make_state_matrix(
        [[0, 1, 0], [1, 0, 0], [1, 1, 1], [0, 0, 1], [1, 0, 1], [0, 1, 0]],
        ["a", "b", "c"],
        step_duration_ms=200.0,
    )


@pytest.fixture
def copy_matrix_file(tmp_path: Path, copy_states: StateMatrix) -> Path:
    return write_state_matrix(copy_states, tmp_path / "copy.csv", seed=0)


@pytest.fixture
def chat_file(tmp_path: Path) -> Path:
    path = tmp_path / "chat.csv"
    pd.DataFrame(
        {
            "line_index": [0, 1, 2],
            "speaker": ["ann", "bob", "ann"],
            "text": ["hi", "hello", "how are you?"],
        }
    ).to_csv(path, index=False)
    return path


@pytest.fixture
def volume_file(tmp_path: Path) -> Path:
    path = tmp_path / "volumes.csv"
    tracks = synthetic.delayed_speaker_tracks(600, lag_steps=10, seed=3)
    synthetic.volume_frame(tracks).to_csv(path, index=False)
    return path


@pytest.fixture
def edit_file(tmp_path: Path) -> Path:
    path = tmp_path / "edits.csv"
    edits = synthetic.edit_log(n_articles=6, seed=5, edits_per_window=30)
    synthetic.edit_frame(edits).to_csv(path, index=False)
    return path


@pytest.fixture
def packet_file(tmp_path: Path) -> Path:
    path = tmp_path / "packets.csv"
    packets = synthetic.request_response_packets(20_000, seed=2)
    pd.DataFrame(packets, columns=["timestamp_us", "src", "dst"]).to_csv(
        path, index=False
    )
    return path


@pytest.fixture
def capture_dir(tmp_path: Path) -> Path:
    """Four dated request-response captures spanning 2011-2013."""
    directory = tmp_path / "captures"
    directory.mkdir()
    dates = ["2011-01-15", "2011-09-15", "2012-06-15", "2013-02-15"]
    captures = synthetic.packet_captures(dates, duration_ms=20_000, seed=11)
    for day, packets in captures.items():
        pd.DataFrame(packets, columns=["timestamp_us", "src", "dst"]).to_csv(
            directory / f"{day}_capture.csv", index=False
        )
    return directory
