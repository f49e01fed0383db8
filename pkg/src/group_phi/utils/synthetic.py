"""Seeded generators of synthetic groups with known structure.

Used to validate the estimators against closed forms and to build test and
demonstration inputs without real interaction data.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from datetime import datetime, timedelta, timezone
from typing import Optional

import numpy as np
import numpy.typing as npt
import pandas as pd

from ..config.defaults import DEFAULT_STEP_MS, QUALITY_LEVELS
from ..core.state import StateMatrix, make_state_matrix
from ..encoders.models import ChatLine, EditRecord, PacketRecord, VolumeTrack

logger = logging.getLogger(__name__)


def copy_system(n_steps: int, seed: int = 0) -> StateMatrix:
    """Two nodes where ``B_t = A_{t-1}`` and ``A`` is a fair coin."""
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 2, size=n_steps)
    b = np.concatenate([[0], a[:-1]])
    return make_state_matrix(np.column_stack([a, b]), ["A", "B"])


def independent_coins(n_nodes: int, n_steps: int, seed: int = 0) -> StateMatrix:
    """Independent fair coins; no integrated information."""
    rng = np.random.default_rng(seed)
    values = rng.integers(0, 2, size=(n_steps, n_nodes))
    return make_state_matrix(values, [f"n{i}" for i in range(n_nodes)])


def copy_pairs(n_pairs: int, n_steps: int, seed: int = 0) -> StateMatrix:
    """Independent copy systems side by side: ``b{i}_t = a{i}_{t-1}``."""
    rng = np.random.default_rng(seed)
    columns, labels = [], []
    for i in range(n_pairs):
        a = rng.integers(0, 2, size=n_steps)
        columns.extend([a, np.concatenate([[0], a[:-1]])])
        labels.extend([f"a{i}", f"b{i}"])
    return make_state_matrix(np.column_stack(columns), labels)


def _logistic_run(
    weights: npt.NDArray[np.float64],
    bias: npt.NDArray[np.float64],
    n_steps: int,
    rng: np.random.Generator,
) -> npt.NDArray[np.uint8]:
    n_nodes = weights.shape[0]
    values = np.zeros((n_steps, n_nodes), dtype=np.uint8)
    values[0] = rng.integers(0, 2, size=n_nodes)
    for t in range(1, n_steps):
        drive = bias + weights @ values[t - 1]
        p_on = 1.0 / (1.0 + np.exp(-drive))
        values[t] = rng.random(n_nodes) < p_on
    return values


def random_markov_system(
    n_nodes: int,
    n_steps: int,
    seed: int = 0,
    coupling: Optional[float] = None,
) -> StateMatrix:
    """Binary system driven by a random logistic coupling matrix.

    Each node turns on with probability ``sigmoid(b_i + sum_j W_ij x_j)``
    given the previous state. ``W`` is Gaussian with scale ``coupling``
    (drawn uniformly from [0, 3] when not given), so a batch of seeds spans
    weakly to strongly integrated systems.
    """
    rng = np.random.default_rng(seed)
    scale = rng.uniform(0.0, 3.0) if coupling is None else coupling
    weights = rng.normal(0.0, scale, size=(n_nodes, n_nodes))
    bias = -0.5 * weights.sum(axis=1)
    values = _logistic_run(weights, bias, n_steps, rng)
    return make_state_matrix(values, [f"n{i}" for i in range(n_nodes)])


def gaussian_var(
    coefficients: npt.ArrayLike,
    n_steps: int,
    seed: int = 0,
    noise: float = 1.0,
    burn_in: int = 100,
) -> npt.NDArray[np.float64]:
    """Simulate ``x_t = A x_{t-1} + e_t`` with i.i.d. Gaussian noise."""
    a = np.asarray(coefficients, dtype=np.float64)
    rng = np.random.default_rng(seed)
    n = a.shape[0]
    shocks = rng.normal(0.0, noise, size=(n_steps + burn_in, n))
    x = np.zeros((n_steps + burn_in, n))
    for t in range(1, n_steps + burn_in):
        x[t] = a @ x[t - 1] + shocks[t]
    return x[burn_in:]


def coupled_ring(
    n_nodes: int,
    n_steps: int,
    seed: int = 0,
    copy_probability: float = 0.6,
    n_constant: int = 0,
) -> StateMatrix:
    """Ring where each node copies its left neighbour with some probability.

    ``n_constant`` all-zero columns labelled ``const{i}`` are appended.
    """
    rng = np.random.default_rng(seed)
    values = np.zeros((n_steps, n_nodes), dtype=np.uint8)
    values[0] = rng.integers(0, 2, size=n_nodes)
    for t in range(1, n_steps):
        copied = np.roll(values[t - 1], 1)
        noise = rng.integers(0, 2, size=n_nodes).astype(np.uint8)
        values[t] = np.where(rng.random(n_nodes) < copy_probability, copied, noise)
    labels = [f"r{i}" for i in range(n_nodes)]
    if n_constant:
        values = np.hstack([values, np.zeros((n_steps, n_constant), dtype=np.uint8)])
        labels += [f"const{i}" for i in range(n_constant)]
    return make_state_matrix(values, labels)


def _bursts(
    n_steps: int, mean_on: float, mean_off: float, rng: np.random.Generator
) -> npt.NDArray[np.bool_]:
    active = np.zeros(n_steps, dtype=bool)
    t, on = 0, bool(rng.integers(0, 2))
    while t < n_steps:
        length = int(rng.geometric(1.0 / (mean_on if on else mean_off)))
        active[t : t + length] = on
        t += length
        on = not on
    return active


def delayed_speaker_tracks(
    n_steps: int,
    lag_steps: int = 10,
    seed: int = 0,
    step_ms: int = DEFAULT_STEP_MS,
    mean_turn_steps: float = 5.0,
    mean_pause_steps: float = 8.0,
) -> list[VolumeTrack]:
    """Two speakers where B repeats A's speaking pattern ``lag_steps`` later.

    Speech is loud (around 1.0) and silence quiet (around 0.05), so a
    threshold of 0.5 separates them.
    """
    rng = np.random.default_rng(seed)
    talking = _bursts(n_steps + lag_steps, mean_turn_steps, mean_pause_steps, rng)
    loudness = np.where(talking, 1.0, 0.05) * rng.uniform(0.9, 1.1, size=talking.size)
    speaker_a = loudness[lag_steps:]
    speaker_b = loudness[:n_steps]
    return [
        VolumeTrack(speaker="A", samples=speaker_a.tolist(), step_ms=step_ms),
        VolumeTrack(speaker="B", samples=speaker_b.tolist(), step_ms=step_ms),
    ]


def volume_frame(tracks: Sequence[VolumeTrack]) -> pd.DataFrame:
    """Tracks as a ``step,<speaker1>,...`` table."""
    frame = pd.DataFrame({track.speaker: track.samples for track in tracks})
    frame.insert(0, "step", np.arange(len(frame)))
    return frame


def chat_log(
    n_lines: int, speakers: Sequence[str], seed: int = 0, reply_probability: float = 0.7
) -> list[ChatLine]:
    """Chat where speakers mostly take turns in roster order.

    With ``reply_probability`` the next speaker is the one after the current
    speaker in ``speakers``; otherwise a random member speaks.
    """
    rng = np.random.default_rng(seed)
    lines = []
    current = int(rng.integers(len(speakers)))
    for i in range(n_lines):
        lines.append(ChatLine(speaker=speakers[current], text=f"message {i}"))
        if rng.random() < reply_probability:
            current = (current + 1) % len(speakers)
        else:
            current = int(rng.integers(len(speakers)))
    return lines


def chat_frame(lines: Sequence[ChatLine]) -> pd.DataFrame:
    """Lines as a ``line_index,speaker,text`` table."""
    return pd.DataFrame(
        {
            "line_index": np.arange(len(lines)),
            "speaker": [line.speaker for line in lines],
            "text": [line.text for line in lines],
        }
    )


def request_response_packets(
    duration_ms: float,
    n_clients: int = 12,
    n_servers: int = 4,
    latency_ms: float = 100.0,
    request_rate_hz: float = 2.0,
    seed: int = 0,
    start_us: int = 0,
) -> list[PacketRecord]:
    """Clients send Poisson requests to random servers; each is answered
    exactly ``latency_ms`` later.

    Hosts are named ``c{i}`` and ``s{j}``; records are sorted by timestamp.
    """
    rng = np.random.default_rng(seed)
    packets: list[PacketRecord] = []
    latency_us = int(round(latency_ms * 1000))
    end_us = int(duration_ms * 1000)
    for i in range(n_clients):
        client = f"c{i}"
        n_requests = int(rng.poisson(request_rate_hz * duration_ms / 1000.0))
        times = np.sort(rng.integers(0, max(end_us - latency_us, 1), size=n_requests))
        servers = rng.integers(0, n_servers, size=n_requests)
        for time_us, j in zip(times, servers):
            server = f"s{int(j)}"
            packets.append(PacketRecord(start_us + int(time_us), client, server))
            packets.append(
                PacketRecord(start_us + int(time_us) + latency_us, server, client)
            )
    packets.sort()
    return packets


def independent_senders(
    duration_ms: float, n_hosts: int = 12, rate_hz: float = 2.0, seed: int = 0
) -> list[PacketRecord]:
    """Hosts sending at Poisson times to random peers, never replying."""
    rng = np.random.default_rng(seed)
    packets: list[PacketRecord] = []
    end_us = int(duration_ms * 1000)
    for i in range(n_hosts):
        n_sent = int(rng.poisson(rate_hz * duration_ms / 1000.0))
        for time_us in np.sort(rng.integers(0, end_us, size=n_sent)):
            peer = int(rng.integers(n_hosts - 1))
            peer += peer >= i
            packets.append(PacketRecord(int(time_us), f"h{i}", f"h{peer}"))
    packets.sort()
    return packets


def random_graph_packets(
    n_nodes: int, out_degree: int = 3, seed: int = 0
) -> list[PacketRecord]:
    """One packet per link of a random directed graph with fixed out-degree."""
    rng = np.random.default_rng(seed)
    packets = []
    for i in range(n_nodes):
        targets = rng.choice(n_nodes - 1, size=out_degree, replace=False)
        for j in targets:
            j = int(j) + (int(j) >= i)
            packets.append(PacketRecord(i, f"n{i}", f"n{j}"))
    return packets


def packet_captures(
    dates: Sequence[str],
    duration_ms: float = 60_000.0,
    seed: int = 0,
    n_clients: int = 12,
    n_servers: int = 4,
    latency_ms: float = 100.0,
    request_rate_hz: float = 2.0,
) -> dict[str, list[PacketRecord]]:
    """One request-response capture per date, seeded ``seed + index``."""
    return {
        day: request_response_packets(
            duration_ms,
            n_clients=n_clients,
            n_servers=n_servers,
            latency_ms=latency_ms,
            request_rate_hz=request_rate_hz,
            seed=seed + i,
        )
        for i, day in enumerate(dates)
    }


def edit_log(
    n_articles: int = 6,
    seed: int = 0,
    n_editors: int = 20,
    changes_per_article: int = 4,
    days_between_changes: int = 120,
    edits_per_window: int = 40,
    start: Optional[datetime] = None,
) -> list[EditRecord]:
    """Edit history with periodic quality reassessments.

    Editors reply to each other: after an edit, the next edit is usually by
    one of two "partners" of the previous editor, a few hours later. Every
    article climbs the quality ladder, one class per change. Records are
    sorted by article, then timestamp.
    """
    rng = np.random.default_rng(seed)
    origin = start or datetime(2010, 1, 1, tzinfo=timezone.utc)
    editors = [f"editor{i}" for i in range(n_editors)]
    partners = {e: rng.choice(n_editors, size=2, replace=False) for e in editors}
    records: list[EditRecord] = []
    for a in range(n_articles):
        article = f"Article_{a}"
        current = int(rng.integers(n_editors))
        first_level = int(rng.integers(0, 2))
        for c in range(changes_per_article):
            change_time = origin + timedelta(days=days_between_changes * (c + 1) + a)
            window_start = change_time - timedelta(days=days_between_changes - 1)
            span_s = (change_time - window_start).total_seconds() - 1
            offsets = np.sort(rng.uniform(0.0, span_s, size=edits_per_window))
            for offset in offsets:
                if rng.random() < 0.8:
                    current = int(partners[editors[current]][int(rng.integers(2))])
                else:
                    current = int(rng.integers(n_editors))
                records.append(
                    EditRecord(
                        timestamp=window_start + timedelta(seconds=float(offset)),
                        editor=editors[current],
                        article=article,
                    )
                )
            level = QUALITY_LEVELS[min(first_level + c, len(QUALITY_LEVELS) - 1)]
            records.append(
                EditRecord(
                    timestamp=change_time,
                    editor=editors[current],
                    article=article,
                    quality_after=level,
                )
            )
    return records


def edit_frame(edits: Sequence[EditRecord]) -> pd.DataFrame:
    """Edits as a ``timestamp_iso8601,article,editor,quality_after`` table."""
    return pd.DataFrame(
        {
            "timestamp_iso8601": [e.timestamp.isoformat() for e in edits],
            "article": [e.article for e in edits],
            "editor": [e.editor for e in edits],
            "quality_after": [e.quality_after or "" for e in edits],
        }
    )


def trend_with_step(
    n_points: int = 60,
    start: str = "2008-01-01",
    end: str = "2016-01-01",
    slope_per_year: float = 1.7,
    step: float = -3.0,
    break_date: str = "2012-03-01",
    intercept: float = 10.0,
    noise: float = 0.2,
    seed: int = 0,
) -> tuple[list[pd.Timestamp], list[float]]:
    """Evenly spaced dates with a linear trend and a step at ``break_date``."""
    rng = np.random.default_rng(seed)
    dates = list(pd.date_range(start, end, periods=n_points))
    origin = pd.Timestamp(start)
    cut = pd.Timestamp(break_date)
    phis = [
        intercept
        + slope_per_year * (d - origin).days / 365.25
        + (step if d >= cut else 0.0)
        + float(rng.normal(0.0, noise))
        for d in dates
    ]
    return dates, phis
