"""
Unit tests for the log encoders.
"""

from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from group_phi.encoders import (
    ChatEncoder,
    EditEncoder,
    PacketEncoder,
    TurnEncoder,
    encode_chat,
    encode_edits,
    encode_packets,
    encode_turns,
    extract_quality_windows,
    filter_outlier_articles,
)
from group_phi.encoders.edit_encoder import group_by_article
from group_phi.encoders.models import ChatLine, EditRecord, PacketRecord, VolumeTrack
from group_phi.encoders.turn_encoder import fill_short_gaps
from group_phi.exceptions import (
    DuplicateLabel,
    EmptyNodeSet,
    InputFormatError,
    MisalignedTracks,
    NonPositiveDelta,
    NonPositiveThreshold,
    TooFewLines,
    UnknownSpeaker,
    UnsortedInput,
)
from group_phi.utils import synthetic

T0 = datetime(2010, 1, 1, tzinfo=timezone.utc)


def _edit(day: float, editor: str, quality=None, article: str = "X") -> EditRecord:
    return EditRecord(
        timestamp=T0 + timedelta(days=day),
        editor=editor,
        article=article,
        quality_after=quality,
    )


class TestTurnEncoder:
    """Test speaking-turn encoding."""

    def test_threshold(self):
        """Steps at or above the threshold are active."""
        tracks = [
            VolumeTrack(speaker="A", samples=[0.1, 0.5, 0.9]),
            VolumeTrack(speaker="B", samples=[0.6, 0.0, 0.0]),
        ]
        states = encode_turns(tracks, threshold=0.5, merge_gap_ms=0)

        assert states.node_labels == ("A", "B")
        assert states.step_duration_ms == 200.0
        np.testing.assert_array_equal(states.values, [[0, 1], [1, 0], [1, 0]])

    def test_crosstalk_suppressed(self):
        """A quiet pickup of someone else's speech is not a turn."""
        tracks = [
            VolumeTrack(speaker="A", samples=[1.0, 0.0]),
            VolumeTrack(speaker="B", samples=[0.4, 0.0]),
        ]
        states = encode_turns(tracks, threshold=0.3, merge_gap_ms=0)
        np.testing.assert_array_equal(states.values[0], [1, 0])

    def test_real_overlap_kept(self):
        """Two comparably loud speakers both count."""
        tracks = [
            VolumeTrack(speaker="A", samples=[1.0, 0.0]),
            VolumeTrack(speaker="B", samples=[0.8, 0.0]),
        ]
        states = encode_turns(tracks, threshold=0.3, merge_gap_ms=0)
        np.testing.assert_array_equal(states.values[0], [1, 1])

    def test_short_gaps_merged(self):
        """Pauses up to the merge gap are bridged; longer ones are not."""
        samples = [1, 1, 0, 0, 1, 0, 0, 0, 1]
        tracks = [VolumeTrack(speaker="A", samples=samples), VolumeTrack(speaker="B", samples=[0] * 9)]
        states = encode_turns(tracks, threshold=0.5, merge_gap_ms=400)
        np.testing.assert_array_equal(states.values[:, 0], [1, 1, 1, 1, 1, 0, 0, 0, 1])

    def test_fill_leaves_edges(self):
        """Leading and trailing silence is not filled."""
        active = np.array([[0], [1], [0], [1], [0]], dtype=bool)
        filled = fill_short_gaps(active, 5)
        assert filled[:, 0].tolist() == [False, True, True, True, False]

    def test_non_positive_threshold(self):
        """The threshold must be positive."""
        tracks = [VolumeTrack(speaker="A", samples=[1.0, 0.0])]
        with pytest.raises(NonPositiveThreshold):
            encode_turns(tracks, threshold=0.0)

    def test_misaligned(self):
        """Tracks must have the same length."""
        tracks = [
            VolumeTrack(speaker="A", samples=[1.0, 0.0]),
            VolumeTrack(speaker="B", samples=[1.0]),
        ]
        with pytest.raises(MisalignedTracks):
            encode_turns(tracks, threshold=0.5)

    def test_negative_volume_rejected(self):
        """Volume samples cannot be negative."""
        with pytest.raises(ValueError):
            VolumeTrack(speaker="A", samples=[0.1, -0.2])

    def test_file_round(self, volume_file: Path):
        """The encoder reads a step table and encodes it with its threshold."""
        encoder = TurnEncoder({"threshold": 0.5})

        assert encoder.can_encode(volume_file)
        states = encoder.encode_file(volume_file)
        assert states.node_labels == ("A", "B")
        assert states.n_steps == 600

    def test_threshold_required(self, volume_file: Path):
        """Encoding without a threshold is refused."""
        encoder = TurnEncoder()
        with pytest.raises(ValueError):
            encoder.encode(encoder.load(volume_file))

    def test_lagged_speakers(self):
        """B repeats A ten steps later after encoding."""
        tracks = synthetic.delayed_speaker_tracks(2000, lag_steps=10, seed=1)
        states = encode_turns(tracks, threshold=0.5, merge_gap_ms=0)
        np.testing.assert_array_equal(states.values[:-10, 0], states.values[10:, 1])


class TestChatEncoder:
    """Test chat encoding."""

    def test_one_hot_rows(self):
        """Each line activates only its author; silent members stay zero."""
        lines = [ChatLine(speaker="ann"), ("bob", "hi"), ChatLine(speaker="ann")]
        states = encode_chat(lines, ["ann", "bob", "cy"])

        np.testing.assert_array_equal(states.values, [[1, 0, 0], [0, 1, 0], [1, 0, 0]])
        assert states.step_duration_ms is None

    def test_unknown_speaker(self):
        """Every author must be on the roster."""
        with pytest.raises(UnknownSpeaker):
            encode_chat([("ann", ""), ("zed", "")], ["ann", "bob"])

    def test_too_few_lines(self):
        """One line is not a conversation."""
        with pytest.raises(TooFewLines):
            encode_chat([("ann", "")], ["ann"])

    def test_file_roster_from_first_lines(self, chat_file: Path):
        """Without a configured roster, speakers appear in order of first line."""
        states = ChatEncoder().encode_file(chat_file)

        assert states.node_labels == ("ann", "bob")
        assert states.n_steps == 3

    def test_configured_roster(self, chat_file: Path):
        """A configured roster fixes the columns."""
        states = ChatEncoder({"roster": ["bob", "ann", "cy"]}).encode_file(chat_file)
        assert states.node_labels == ("bob", "ann", "cy")

    def test_missing_columns(self, tmp_path: Path):
        """Files without the chat columns are rejected."""
        path = tmp_path / "bad.csv"
        path.write_text("speaker\nann\n", encoding="utf-8")

        assert not ChatEncoder().can_encode(path)
        with pytest.raises(InputFormatError):
            ChatEncoder().load(path)


class TestEditEncoder:
    """Test quality-window extraction and edit encoding."""

    def setup_method(self):
        self.edits = [
            _edit(1, "e0"),
            _edit(2, "e1"),
            _edit(3, "e2"),
            _edit(4, "e0"),
            _edit(10, "e1", quality="B"),
            _edit(12, "e2", quality="B"),
            _edit(15, "e3"),
            _edit(40, "e0", quality="GA"),
        ]

    def test_first_assessment_is_a_change(self):
        """The first quality label opens a window of the preceding edits."""
        windows = extract_quality_windows(self.edits, 30)

        assert windows[0].new_quality == "B"
        assert [e.editor for e in windows[0].edits] == ["e0", "e1", "e2", "e0"]

    def test_repeated_label_is_not_a_change(self):
        """Re-asserting the same class does not open a window."""
        windows = extract_quality_windows(self.edits, 30)
        assert [w.new_quality for w in windows] == ["B", "GA"]

    def test_window_excludes_old_edits(self):
        """Only edits inside [change - days, change) are kept."""
        windows = extract_quality_windows(self.edits, 30)
        ga = windows[1]

        assert ga.change_time == T0 + timedelta(days=40)
        assert [e.editor for e in ga.edits] == ["e1", "e2", "e3"]

    def test_small_windows_discarded(self):
        """Windows with fewer than three editors are dropped."""
        windows = extract_quality_windows(self.edits, 7)
        assert windows == []

    def test_windows_are_repeatable(self):
        """Extracting twice gives the same windows."""
        assert extract_quality_windows(self.edits, 30) == extract_quality_windows(
            self.edits, 30
        )

    def test_later_edits_leave_earlier_windows(self):
        """Edits appended after the last change do not alter existing windows."""
        before = extract_quality_windows(self.edits, 30)
        extended = [
            *self.edits,
            _edit(45, "e4"),
            _edit(50, "e5"),
            _edit(55, "e1", quality="FA"),
        ]
        after = extract_quality_windows(extended, 30)

        assert after[: len(before)] == before
        assert [w.new_quality for w in after] == ["B", "GA", "FA"]

    def test_unsorted(self):
        """Edits must be in time order."""
        with pytest.raises(UnsortedInput):
            extract_quality_windows([_edit(2, "a"), _edit(1, "b")], 30)

    def test_single_article(self):
        """Windows are cut per article."""
        with pytest.raises(ValueError):
            extract_quality_windows([_edit(1, "a"), _edit(2, "b", article="Y")], 30)

    def test_encode_edits(self):
        """One row per edit, editors in order of first edit."""
        window = extract_quality_windows(self.edits, 30)[0]
        states = encode_edits(window)

        assert states.node_labels == ("e0", "e1", "e2")
        np.testing.assert_array_equal(
            states.values, [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 0]]
        )
        assert states.origin_time == (T0 + timedelta(days=1)).isoformat()

    def test_outlier_articles(self):
        """Articles above the edit cap are removed entirely."""
        edits = [_edit(1, "a"), _edit(2, "b"), _edit(3, "c", article="Y")]
        kept = filter_outlier_articles(edits, 1)
        assert [e.article for e in kept] == ["Y"]

    def test_group_by_article_sorts(self):
        """Edits are grouped per article in time order."""
        grouped = group_by_article([_edit(5, "a"), _edit(1, "b", article="Y"), _edit(2, "c")])

        assert list(grouped) == ["X", "Y"]
        assert [e.editor for e in grouped["X"]] == ["c", "a"]

    def test_file_windows(self, edit_file: Path):
        """Every article yields windows for each configured length."""
        encoder = EditEncoder({"window_days": [30, 60]})
        windows = encoder.windows(encoder.load(edit_file))

        assert windows
        assert {w.window_days for w in windows} == {30, 60}
        for window in windows:
            assert len(window.editors) >= 3

    def test_file_encode_pairs(self, edit_file: Path):
        """encode() pairs each window with its matrix."""
        pairs = EditEncoder({"window_days": 90}).encode_file(edit_file)
        for window, states in pairs:
            assert states.n_steps == len(window.edits)


class TestPacketEncoder:
    """Test packet binning."""

    def setup_method(self):
        self.packets = [
            PacketRecord(0, "a", "b"),
            PacketRecord(150_000, "b", "a"),
            PacketRecord(250_000, "a", "c"),
        ]

    def test_sending_marks_activity(self):
        """A node is active in a bin when it sent; receiving does not count."""
        states = encode_packets(self.packets, ["a", "b", "c"], delta_ms=100, span_ms=300)

        np.testing.assert_array_equal(states.values, [[1, 0, 0], [0, 1, 0], [1, 0, 0]])
        assert states.step_duration_ms == 100.0

    def test_span_rounds_up(self):
        """A partial last bin still gets a row."""
        states = encode_packets(self.packets, ["a", "b"], delta_ms=100, span_ms=250)
        assert states.n_steps == 3

    def test_set_is_sorted(self):
        """Unordered node sets become sorted columns."""
        states = encode_packets(self.packets, {"b", "a"}, delta_ms=100, span_ms=300)
        assert states.node_labels == ("a", "b")

    def test_origin_shift(self):
        """Packets before the origin are ignored."""
        states = encode_packets(
            self.packets, ["a", "b"], delta_ms=100, span_ms=200, origin_us=100_000
        )
        np.testing.assert_array_equal(states.values, [[0, 1], [1, 0]])

    def test_bad_delta(self):
        """The bin width must be positive."""
        with pytest.raises(NonPositiveDelta):
            encode_packets(self.packets, ["a"], delta_ms=0, span_ms=300)

    def test_empty_nodes(self):
        """At least one node is needed."""
        with pytest.raises(EmptyNodeSet):
            encode_packets(self.packets, [], delta_ms=100, span_ms=300)

    def test_repeated_hosts(self):
        """A host listed twice is refused."""
        with pytest.raises(DuplicateLabel):
            encode_packets(self.packets, ["a", "b", "a"], delta_ms=100, span_ms=300)

    def test_active_cells_bounded_by_packets(self):
        """Each active cell needs at least one sent packet inside the span."""
        packets = synthetic.request_response_packets(5_000, seed=6)
        hosts = sorted({p.src for p in packets})
        states = encode_packets(packets, hosts, delta_ms=50, span_ms=2_000)

        in_range = [p for p in packets if p.timestamp_us < 2_000_000]
        assert 0 < int(states.values.sum()) <= len(in_range)

    def test_frame_input(self):
        """Frames and record lists encode the same way."""
        frame = pd.DataFrame(self.packets, columns=["timestamp_us", "src", "dst"])
        from_frame = encode_packets(frame, ["a", "b"], delta_ms=100, span_ms=300)
        from_list = encode_packets(self.packets, ["a", "b"], delta_ms=100, span_ms=300)
        assert from_frame == from_list

    def test_encoder_defaults(self):
        """Default span covers every packet plus one bin; nodes are all senders."""
        frame = pd.DataFrame(self.packets, columns=["timestamp_us", "src", "dst"])
        states = PacketEncoder({"delta_ms": 100}).encode(frame)

        assert states.node_labels == ("a", "b")
        assert states.n_steps == 4

    def test_file_load(self, packet_file: Path):
        """Packet CSVs load as normalized frames."""
        frame = PacketEncoder().load(packet_file)

        assert list(frame.columns) == ["timestamp_us", "src", "dst"]
        assert frame["timestamp_us"].dtype == np.int64
