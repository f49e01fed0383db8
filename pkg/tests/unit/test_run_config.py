"""Tests for run configuration management."""

import json
from pathlib import Path

import pytest
import yaml

from group_phi.config.run_config import RunConfig, RunConfigManager
from group_phi.config.settings import Config, load_config_file, parse_flat_config
from group_phi.exceptions import InputFormatError


class TestRunConfig:
    """Test RunConfig dataclass."""

    def test_run_config_defaults(self):
        """Test RunConfig with default values."""
        config = RunConfig()

        assert config.step_ms == 200
        assert config.merge_gap_ms == 400
        assert config.window_days == [30, 60, 90]
        assert config.max_nodes == 16
        assert config.sampler == "random_walk"
        assert config.goal == 100
        assert config.replicates == 100
        assert config.walk_continue_probability == 0.85
        assert config.fire_mean == 2.3
        assert config.taus == list(range(1, 31))
        assert config.break_date == "2012-03-01"
        assert config.stabilize is True
        assert config.method is None

    def test_echo_drops_output_and_directories(self):
        """Test that the echo is independent of where files live."""
        config = RunConfig(
            command="phi",
            inputs=["/data/a/group1.csv"],
            output="/tmp/run1/out.json",
            scores="/data/scores.csv",
        )
        echoed = config.echo()

        assert "output" not in echoed
        assert echoed["inputs"] == ["group1.csv"]
        assert echoed["scores"] == "scores.csv"
        assert echoed["command"] == "phi"


class TestConfig:
    """Test the nested Config store."""

    def test_plain_and_dotted_keys(self):
        """Test that plain parameter names map to their section."""
        config = Config({"goal": 50, "phi.method": "atomic"})

        assert config.get("sampling.goal") == 50
        assert config.get("goal") == 50
        assert config.get("method") == "atomic"

    def test_nested_merge(self):
        """Test that nested sections merge without dropping siblings."""
        config = Config({"sampling": {"goal": 20}})

        assert config.get("goal") == 20
        assert config.get("replicates") == 100

    def test_update_skips_none(self):
        """Test that unset flags do not override file values."""
        config = Config({"seed": 7})
        config.update({"seed": None, "workers": 4})

        assert config.get("seed") == 7
        assert config.get("workers") == 4

    def test_missing_key_default(self):
        """Test the default for unknown paths."""
        assert Config().get("nothing.here", "fallback") == "fallback"


class TestFlatConfig:
    """Test flat key=value parsing."""

    def test_scalars_and_lists(self):
        """Test that values are YAML scalars and commas make lists."""
        parsed = parse_flat_config(
            "# comment\n"
            "goal = 8\n"
            "stabilize = false\n"
            "taus = 1,2,3  # inline\n"
            "sampler = forest_fire\n"
            "roster =\n"
        )

        assert parsed == {
            "goal": 8,
            "stabilize": False,
            "taus": [1, 2, 3],
            "sampler": "forest_fire",
            "roster": None,
        }

    def test_missing_equals(self):
        """Test that malformed lines are reported with their position."""
        with pytest.raises(ValueError, match=":2:"):
            parse_flat_config("goal = 3\njust words\n", "run.conf")


class TestRunConfigManager:
    """Test RunConfigManager functionality."""

    @pytest.fixture
    def config_manager(self):
        """Create a RunConfigManager instance."""
        return RunConfigManager()

    @pytest.fixture
    def sample_config_dict(self):
        """Sample nested configuration dictionary."""
        return {
            "phi": {"method": "autoregressive", "max_nodes": 10},
            "sampling": {"sampler": "breadth_first", "goal": 12, "replicates": 5},
            "run": {"seed": 42},
        }

    def test_load_default_config(self, config_manager):
        """Test loading without a file."""
        config = config_manager.load_config()

        assert isinstance(config, RunConfig)
        assert config.seed == 0
        assert config.delta_ms is None

    def test_load_yaml_config(self, config_manager, sample_config_dict, tmp_path: Path):
        """Test loading configuration from YAML file."""
        path = tmp_path / "run.yaml"
        path.write_text(yaml.dump(sample_config_dict), encoding="utf-8")

        config = config_manager.load_config(path)

        assert config.method == "autoregressive"
        assert config.max_nodes == 10
        assert config.sampler == "breadth_first"
        assert config.goal == 12
        assert config.seed == 42

    def test_load_json_config(self, config_manager, sample_config_dict, tmp_path: Path):
        """Test loading configuration from JSON file."""
        path = tmp_path / "run.json"
        path.write_text(json.dumps(sample_config_dict), encoding="utf-8")

        assert config_manager.load_config(path).replicates == 5

    def test_flags_override_file(self, config_manager, sample_config_dict, tmp_path: Path):
        """Test precedence: flags over file over defaults."""
        path = tmp_path / "run.yaml"
        path.write_text(yaml.dump(sample_config_dict), encoding="utf-8")

        config = config_manager.load_config(
            path,
            {"command": "sample", "inputs": ["p.csv"], "goal": 30, "seed": None},
        )

        assert config.goal == 30
        assert config.seed == 42
        assert config.command == "sample"
        assert config.inputs == ["p.csv"]

    def test_unknown_flag(self, config_manager):
        """Test that unknown parameters are refused."""
        with pytest.raises(ValueError, match="Unknown run parameters"):
            config_manager.load_config(overrides={"colour": "blue"})

    def test_missing_file(self, config_manager, tmp_path: Path):
        """Test loading a configuration file that does not exist."""
        with pytest.raises(FileNotFoundError):
            config_manager.load_config(tmp_path / "absent.yaml")

    def test_yaml_must_be_mapping(self, tmp_path: Path):
        """Test that a YAML list is not a configuration."""
        path = tmp_path / "run.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(ValueError):
            load_config_file(path)

    @pytest.mark.parametrize(
        "name, text",
        [("run.json", '{"phi": {"tau": 2,}'), ("run.yaml", "phi: [tau: 2\n")],
    )
    def test_unparsable_file(self, tmp_path: Path, name: str, text: str):
        """Test that broken JSON or YAML is an input format error naming the file."""
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        with pytest.raises(InputFormatError) as info:
            load_config_file(path)
        assert info.value.path == str(path)

    @pytest.mark.parametrize(
        "overrides",
        [
            {"threshold": -1.0},
            {"goal": 1},
            {"method": "spectral"},
            {"sampler": "snowball"},
            {"walk_continue_probability": 1.0},
            {"taus": [0, 1]},
            {"deltas": [-5.0]},
            {"workers": 0},
            {"max_nodes": 1},
            {"break_date": "not a date"},
            {"crosstalk_margin": 1.5},
        ],
    )
    def test_validation(self, config_manager, overrides):
        """Test that out-of-range parameters are rejected."""
        with pytest.raises(ValueError):
            config_manager.load_config(overrides=overrides)

    def test_save_and_reload_default_config(self, config_manager, tmp_path: Path):
        """Test that a saved template loads back to the defaults."""
        path = tmp_path / "group_phi.conf"
        config_manager.save_default_config(path)

        text = path.read_text(encoding="utf-8")
        assert "# [sampling]" in text
        assert "goal = 100" in text

        reloaded = config_manager.load_config(path)
        assert reloaded == config_manager.load_config()

    def test_example_config(self, config_manager):
        """Test that the example configuration shipped with the project loads."""
        path = Path(__file__).parents[2] / "group_phi.yaml"
        config = config_manager.load_config(path)

        assert config.threshold == 0.5
        assert config.taus == list(range(1, 31))
        assert config.break_date == "2012-03-01"
