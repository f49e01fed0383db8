"""
Integration tests for the group-phi command line.
"""

import json
from pathlib import Path

import pandas as pd
import pytest

from group_phi.cli.main import create_parser, main
from group_phi.config.run_config import RunConfigManager
from group_phi.utils.io_utils import read_state_matrix


def _error(stderr: str) -> dict:
    """The JSON error object is the last line written to stderr."""
    return json.loads(stderr.strip().splitlines()[-1])


class TestParser:
    """Test the top-level parser."""

    def test_no_command(self, capsys):
        """Without a command the help is printed and the run fails."""
        assert main([]) == 1
        assert "group-phi" in capsys.readouterr().out

    def test_version(self, capsys):
        """--version prints and exits cleanly."""
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0
        assert "group-phi" in capsys.readouterr().out

    def test_subcommands(self):
        """Every command is registered."""
        parser = create_parser()
        for command in ["encode", "phi", "sample", "sweep", "stats", "pipeline"]:
            args = parser.parse_args([command, *_required(command)])
            assert args.command == command


def _required(command: str) -> list[str]:
    return {
        "encode": ["chat", "--input", "x.csv"],
        "phi": ["empirical", "--input", "x.csv"],
        "sample": ["--input", "x.csv"],
        "sweep": ["tau", "--input", "x.csv"],
        "stats": ["corr", "--input", "x.csv"],
        "pipeline": ["study1", "--input", "x.csv"],
    }[command]


class TestErrors:
    """Test exit codes and the JSON error report."""

    def test_missing_input(self, tmp_path: Path, capsys):
        """A missing input is an I/O error naming the file."""
        missing = tmp_path / "absent.csv"
        code = main(["phi", "empirical", "--input", str(missing)])

        assert code == 2
        error = _error(capsys.readouterr().err)
        assert error["error"] == "FileNotFoundError"
        assert error["path"] == str(missing)
        assert error["exit_code"] == 2

    def test_bad_matrix(self, tmp_path: Path, capsys):
        """A malformed state matrix is an input format error."""
        path = tmp_path / "bad.csv"
        path.write_text("step,x\n0,1\n", encoding="utf-8")

        assert main(["phi", "empirical", "--input", str(path)]) == 2
        assert _error(capsys.readouterr().err)["error"] == "InputFormatError"

    def test_computation_error(self, chat_file: Path, tmp_path: Path, capsys):
        """Turn encoding without a threshold fails with status 1."""
        code = main(
            ["encode", "turns", "--input", str(chat_file), "-o", str(tmp_path / "m.csv")]
        )
        assert code == 1
        assert "threshold" in _error(capsys.readouterr().err)["message"]

    def test_invalid_parameter(self, copy_matrix_file: Path, capsys):
        """Out-of-range parameters are refused before any work."""
        code = main(["phi", "empirical", "--input", str(copy_matrix_file), "--max-nodes", "1"])
        assert code == 1
        assert _error(capsys.readouterr().err)["exit_code"] == 1


class TestPhiCommand:
    """Test the phi command."""

    def test_stdout(self, copy_matrix_file: Path, capsys):
        """Without --output the result envelope goes to stdout."""
        assert main(["phi", "empirical", "--input", str(copy_matrix_file), "-q"]) == 0
        payload = json.loads(capsys.readouterr().out)

        assert payload["tool"] == "group-phi"
        assert payload["config"]["inputs"] == ["copy.csv"]
        assert payload["result"]["value"] == pytest.approx(1.0, abs=0.02)
        assert payload["result"]["method"] == "empirical"

    def test_output_file(self, copy_matrix_file: Path, tmp_path: Path):
        """--output writes the same envelope to a file."""
        output = tmp_path / "phi.json"
        code = main(
            [
                "phi",
                "empirical",
                "--input",
                str(copy_matrix_file),
                "--output",
                str(output),
                "--seed",
                "4",
            ]
        )
        payload = json.loads(output.read_text(encoding="utf-8"))

        assert code == 0
        assert payload["seed"] == 4
        assert "output" not in payload["config"]

    def test_node_set_selects_columns(self, copy_matrix_file: Path, tmp_path: Path, capsys):
        """--nodes restricts the matrix to the listed labels, in file order."""
        nodes = tmp_path / "replicate_000.txt"
        nodes.write_text("B\nA\n", encoding="utf-8")

        code = main(
            ["phi", "empirical", "--input", str(copy_matrix_file), "--nodes", str(nodes)]
        )
        result = json.loads(capsys.readouterr().out)["result"]

        assert code == 0
        assert result["value"] == pytest.approx(1.0, abs=0.02)
        assert sorted(map(sorted, result["partition"])) == [["A"], ["B"]]

    def test_node_set_unknown_label(self, copy_matrix_file: Path, tmp_path: Path, capsys):
        """Labels missing from the matrix are an input error."""
        nodes = tmp_path / "nodes.txt"
        nodes.write_text("A\nZ\n", encoding="utf-8")

        code = main(
            ["phi", "empirical", "--input", str(copy_matrix_file), "--nodes", str(nodes)]
        )
        error = _error(capsys.readouterr().err)

        assert code == 2
        assert error["error"] == "InputFormatError"
        assert error["path"] == str(nodes)


class TestEncodeCommand:
    """Test the encode command."""

    def test_chat(self, chat_file: Path, tmp_path: Path):
        """One row per chat line, one column per speaker."""
        output = tmp_path / "chat_matrix.csv"
        assert main(["encode", "chat", "--input", str(chat_file), "-o", str(output)]) == 0

        states = read_state_matrix(output)
        assert states.n_steps == 3
        assert states.node_labels == ("ann", "bob")

    def test_turns(self, volume_file: Path, tmp_path: Path):
        """Volume tracks become a talking matrix with a step duration."""
        output = tmp_path / "turns.csv"
        code = main(
            [
                "encode",
                "turns",
                "--input",
                str(volume_file),
                "--threshold",
                "0.5",
                "-o",
                str(output),
            ]
        )
        assert code == 0
        assert read_state_matrix(output).step_duration_ms == 200.0

    def test_edits(self, edit_file: Path, tmp_path: Path):
        """Edit logs write one matrix per window plus an index."""
        output = tmp_path / "windows"
        assert main(["encode", "edits", "--input", str(edit_file), "-o", str(output)]) == 0

        index = json.loads((output / "windows.json").read_text(encoding="utf-8"))
        assert index["result"]
        for row in index["result"]:
            assert (output / row["file"]).is_file()
            assert row["window_days"] in (30, 60, 90)

    def test_packets(self, packet_file: Path, tmp_path: Path):
        """Packets are binned at the given step size."""
        output = tmp_path / "packets_matrix.csv"
        code = main(
            [
                "encode",
                "packets",
                "--input",
                str(packet_file),
                "--delta-ms",
                "100",
                "-o",
                str(output),
            ]
        )
        assert code == 0
        assert read_state_matrix(output).step_duration_ms == 100.0


class TestSampleCommand:
    """Test the sample command."""

    def test_replicates(self, packet_file: Path, tmp_path: Path):
        """One node-set file per replicate plus an index."""
        output = tmp_path / "samples"
        code = main(
            [
                "sample",
                "--input",
                str(packet_file),
                "--goal",
                "5",
                "--replicates",
                "3",
                "--sampler",
                "forest_fire",
                "-o",
                str(output),
            ]
        )
        assert code == 0
        files = sorted(p.name for p in output.glob("replicate_*.txt"))
        assert files == ["replicate_000.txt", "replicate_001.txt", "replicate_002.txt"]
        for name in files:
            assert len((output / name).read_text(encoding="utf-8").split()) == 5

        index = json.loads((output / "samples.json").read_text(encoding="utf-8"))
        assert index["result"]["files"] == files

    def test_goal_too_large(self, packet_file: Path, tmp_path: Path, capsys):
        """Asking for more hosts than the capture holds fails."""
        code = main(
            ["sample", "--input", str(packet_file), "--goal", "500", "-o", str(tmp_path)]
        )
        assert code == 1
        assert _error(capsys.readouterr().err)["error"] == "InsufficientNodes"


class TestSweepCommand:
    """Test the sweep command."""

    def test_tau(self, copy_matrix_file: Path, tmp_path: Path):
        """The copy system peaks at a delay of one step."""
        output = tmp_path / "sweep"
        code = main(
            [
                "sweep",
                "tau",
                "--input",
                str(copy_matrix_file),
                str(copy_matrix_file),
                "--taus",
                "1-3",
                "-o",
                str(output),
            ]
        )
        assert code == 0
        for suffix in ("csv", "json", "svg"):
            assert (output / f"sweep_tau.{suffix}").is_file()

        payload = json.loads((output / "sweep_tau.json").read_text(encoding="utf-8"))
        assert payload["result"]["argmax"] == 1
        assert payload["result"]["n_valid"][0] == 2

    def test_needs_output(self, copy_matrix_file: Path, capsys):
        """Sweeps write files and so need a directory."""
        assert main(["sweep", "tau", "--input", str(copy_matrix_file)]) == 1
        assert "--output" in _error(capsys.readouterr().err)["message"]


class TestStatsCommand:
    """Test the stats command."""

    @pytest.fixture
    def table_file(self, tmp_path: Path) -> Path:
        path = tmp_path / "table.csv"
        pd.DataFrame(
            {
                "phi": [0.1, 0.4, 0.3, 0.8, 0.9, 0.7],
                "quality": ["C", "B", "B", "GA", "FA", "GA"],
                "editors": [3, 5, 4, 8, 9, 7],
            }
        ).to_csv(path, index=False)
        return path

    def test_corr(self, table_file: Path, capsys):
        """Pearson r of two numeric columns."""
        code = main(["stats", "corr", "--input", str(table_file), "--x", "phi", "--y", "editors"])
        result = json.loads(capsys.readouterr().out)["result"]

        assert code == 0
        assert result["statistic"] == "pearson_r"
        assert result["n"] == 6
        assert result["value"] > 0.9

    def test_tau_ranks_quality(self, table_file: Path, capsys):
        """Quality labels are ranked before Kendall tau."""
        code = main(["stats", "tau", "--input", str(table_file), "--x", "phi", "--y", "quality"])
        result = json.loads(capsys.readouterr().out)["result"]

        assert code == 0
        assert result["value"] > 0.5

    def test_wilcoxon_explicit_pair(self, table_file: Path, capsys):
        """Pairs given on the command line are the only ones compared."""
        code = main(
            [
                "stats",
                "wilcoxon",
                "--input",
                str(table_file),
                "--value",
                "phi",
                "--group",
                "quality",
                "--pair",
                "B",
                "GA",
            ]
        )
        result = json.loads(capsys.readouterr().out)["result"]

        assert code == 0
        assert result["n"] == {"B": 2, "C": 1, "FA": 1, "GA": 2}
        assert list(result["z"]) == ["B-GA"]

    def test_ols_quality_reference(self, table_file: Path, capsys):
        """The lowest quality class present is the reference level."""
        code = main(
            [
                "stats",
                "ols",
                "--input",
                str(table_file),
                "--y",
                "phi",
                "--numeric",
                "editors",
                "--categorical",
                "quality",
            ]
        )
        result = json.loads(capsys.readouterr().out)["result"]

        assert code == 0
        assert result["fit"]["names"] == [
            "intercept",
            "editors",
            "quality[B]",
            "quality[GA]",
            "quality[FA]",
        ]

    def test_adjust_removes_step(self, tmp_path: Path, capsys):
        """The fitted step matches the one put into the series."""
        from group_phi.utils.synthetic import trend_with_step

        dates, phis = trend_with_step(step=-3.0, noise=0.05, seed=2)
        path = tmp_path / "series.csv"
        pd.DataFrame(
            {"date": [d.strftime("%Y-%m-%d") for d in dates], "phi": phis}
        ).to_csv(path, index=False)

        code = main(
            ["stats", "adjust", "--input", str(path), "--date", "date", "--y", "phi"]
        )
        result = json.loads(capsys.readouterr().out)["result"]

        assert code == 0
        assert result["break_date"] == "2012-03-01"
        assert result["step"] == pytest.approx(-3.0, abs=0.2)
        assert len(result["adjusted"]) == len(phis)

    def test_missing_column_flags(self, table_file: Path, capsys):
        """Each statistic names the flags it needs."""
        assert main(["stats", "corr", "--input", str(table_file), "--x", "phi"]) == 1
        assert "--y" in _error(capsys.readouterr().err)["message"]


class TestGenerateConfig:
    """Test the generate-config command."""

    def test_write_and_reload(self, tmp_path: Path):
        """The template loads back to the defaults."""
        path = tmp_path / "group_phi.conf"
        assert main(["generate-config", "-o", str(path)]) == 0

        manager = RunConfigManager()
        assert manager.load_config(path) == manager.load_config()

    def test_refuses_overwrite(self, tmp_path: Path, capsys):
        """An existing file is kept unless --force is given."""
        path = tmp_path / "group_phi.conf"
        path.write_text("goal = 5\n", encoding="utf-8")

        assert main(["generate-config", "-o", str(path)]) == 2
        assert _error(capsys.readouterr().err)["error"] == "FileExistsError"
        assert path.read_text(encoding="utf-8") == "goal = 5\n"

        assert main(["generate-config", "-o", str(path), "--force"]) == 0
        assert "goal = 100" in path.read_text(encoding="utf-8")

    def test_config_file_used(self, copy_matrix_file: Path, tmp_path: Path, capsys):
        """Values from --config reach the run and its echo."""
        path = tmp_path / "run.conf"
        path.write_text("tau = 2\nstabilize = false\n", encoding="utf-8")

        code = main(
            ["phi", "empirical", "--input", str(copy_matrix_file), "--config", str(path)]
        )
        payload = json.loads(capsys.readouterr().out)

        assert code == 0
        assert payload["config"]["tau"] == 2
        assert payload["result"]["tau"] == 2
        assert payload["result"]["retries"] == 0

    def test_unparsable_config(self, copy_matrix_file: Path, tmp_path: Path, capsys):
        """A broken JSON config is an input error, not a computation error."""
        path = tmp_path / "run.json"
        path.write_text('{"phi": {"tau": 2,}', encoding="utf-8")

        code = main(
            ["phi", "empirical", "--input", str(copy_matrix_file), "--config", str(path)]
        )
        error = _error(capsys.readouterr().err)

        assert code == 2
        assert error["error"] == "InputFormatError"
        assert error["path"] == str(path)
