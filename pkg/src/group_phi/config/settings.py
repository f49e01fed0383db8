"""Group-phi configuration settings.

Nested default configuration and the file loader. Configuration files may
be YAML (``.yml``/``.yaml``), JSON (``.json``) or flat ``key=value`` text
(any other suffix). Flat keys are either dot paths (``phi.method``) or
plain run parameters (``method``); see :data:`FIELD_PATHS`.
"""

from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any, Optional, Union

import yaml

from ..exceptions import InputFormatError
from .defaults import (
    DEFAULT_BREAK_DATE,
    DEFAULT_CROSSTALK_MARGIN,
    DEFAULT_DELTA_GRID_MS,
    DEFAULT_GOAL,
    DEFAULT_MERGE_GAP_MS,
    DEFAULT_NODE_CAP,
    DEFAULT_REPLICATES,
    DEFAULT_SAMPLER,
    DEFAULT_SEED,
    DEFAULT_STEP_MS,
    DEFAULT_TAU_GRID,
    FIRE_MEAN,
    WALK_CONTINUE_PROBABILITY,
    WINDOW_DAYS,
)

# Default configuration
DEFAULT_CONFIG: dict[str, Any] = {
    "turns": {
        "threshold": None,
        "step_ms": DEFAULT_STEP_MS,
        "merge_gap_ms": DEFAULT_MERGE_GAP_MS,
        "crosstalk_margin": DEFAULT_CROSSTALK_MARGIN,
    },
    "chat": {
        "roster": [],
    },
    "edits": {
        "window_days": list(WINDOW_DAYS),
        "max_edits": None,
    },
    "packets": {
        "delta_ms": None,
        "span_ms": None,
        "nodes": [],
    },
    "phi": {
        "method": None,
        "tau": 1,
        "max_nodes": DEFAULT_NODE_CAP,
        "stabilize": True,
    },
    "sampling": {
        "sampler": DEFAULT_SAMPLER,
        "goal": DEFAULT_GOAL,
        "replicates": DEFAULT_REPLICATES,
        "walk_continue_probability": WALK_CONTINUE_PROBABILITY,
        "fire_mean": FIRE_MEAN,
    },
    "sweep": {
        "taus": list(DEFAULT_TAU_GRID),
        "deltas": list(DEFAULT_DELTA_GRID_MS),
    },
    "stats": {
        "break_date": DEFAULT_BREAK_DATE,
        "scores": None,
    },
    "run": {
        "seed": DEFAULT_SEED,
        "workers": 1,
        "deterministic": False,
        "resume": False,
    },
}

# Plain run parameter -> dot path in the nested configuration.
FIELD_PATHS: dict[str, str] = {
    key: f"{section}.{key}"
    for section, values in DEFAULT_CONFIG.items()
    for key in values
}


class Config:
    """Configuration manager for group-phi."""

    def __init__(self, config_dict: Optional[dict[str, Any]] = None) -> None:
        """Initialize configuration.

        Args:
            config_dict: Custom configuration, nested by section or keyed by
                plain run parameter names.
        """
        self._config: dict[str, Any] = copy.deepcopy(DEFAULT_CONFIG)
        if config_dict:
            self._merge_config(config_dict)

    def get(self, key_path: str, default: Any = None) -> Any:
        """Get configuration value by dot-separated key path.

        Args:
            key_path: Dot-separated path (e.g., "phi.max_nodes") or a plain
                run parameter name (e.g., "max_nodes").
            default: Default value if key not found.

        Returns:
            Configuration value.
        """
        keys = FIELD_PATHS.get(key_path, key_path).split(".")
        value = self._config

        try:
            for key in keys:
                value = value[key]
            return value
        except (KeyError, TypeError):
            return default

    def set(self, key_path: str, value: Any) -> None:
        """Set configuration value by dot-separated key path.

        Args:
            key_path: Dot-separated path or plain run parameter name.
            value: Value to set.
        """
        keys = FIELD_PATHS.get(key_path, key_path).split(".")
        config = self._config

        # Navigate to parent of target key
        for key in keys[:-1]:
            if key not in config:
                config[key] = {}
            config = config[key]

        config[keys[-1]] = value

    def _merge_config(self, custom_config: dict[str, Any]) -> None:
        """Merge custom configuration with the current one.

        Args:
            custom_config: Custom configuration to merge.
        """

        def merge_dict(base: dict[str, Any], custom: dict[str, Any]) -> dict[str, Any]:
            for key, value in custom.items():
                if (
                    key in base
                    and isinstance(base[key], dict)
                    and isinstance(value, dict)
                ):
                    merge_dict(base[key], value)
                else:
                    base[key] = value
            return base

        nested: dict[str, Any] = {}
        for key, value in custom_config.items():
            key = key.replace("-", "_")
            if key in FIELD_PATHS or "." in key:
                self.set(key, value)
            else:
                nested[key] = value
        _ = merge_dict(self._config, nested)

    def update(self, overrides: dict[str, Any]) -> None:
        """Apply overrides, skipping ``None`` values (unset flags)."""
        self._merge_config({k: v for k, v in overrides.items() if v is not None})

    def flatten(self) -> dict[str, Any]:
        """Plain run parameters and their current values."""
        return {key: self.get(path) for key, path in FIELD_PATHS.items()}

    def to_dict(self) -> dict[str, Any]:
        return copy.deepcopy(self._config)


def _flat_value(raw: str) -> Any:
    text = raw.strip()
    if not text:
        return None
    if "," in text and not text.startswith("["):
        return [_flat_value(part) for part in text.split(",") if part.strip()]
    return yaml.safe_load(text)


def parse_flat_config(text: str, source: str = "<string>") -> dict[str, Any]:
    """Parse flat ``key=value`` lines.

    Blank lines and ``#`` comments are ignored. Values are read as YAML
    scalars, so ``10`` is an int and ``true`` a bool; comma-separated
    values become lists.

    Raises:
        ValueError: If a line has no ``=``.
    """
    parsed: dict[str, Any] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"{source}:{number}: expected key=value, got {line!r}")
        key, raw = stripped.split("=", 1)
        parsed[key.strip()] = _flat_value(raw)
    return parsed


def load_config_file(config_path: Union[str, Path]) -> Config:
    """Load configuration from file.

    Args:
        config_path: Path to a YAML, JSON or flat ``key=value`` file.

    Returns:
        Config instance.

    Raises:
        FileNotFoundError: If configuration file doesn't exist.
        InputFormatError: If a YAML or JSON file cannot be parsed.
        ValueError: If the file does not hold a mapping.
    """
    config_path_obj = Path(config_path)

    if not config_path_obj.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    text = config_path_obj.read_text(encoding="utf-8")
    suffix = config_path_obj.suffix.lower()
    try:
        if suffix in [".yml", ".yaml"]:
            custom_config = yaml.safe_load(text) or {}
        elif suffix == ".json":
            custom_config = json.loads(text)
        else:
            custom_config = parse_flat_config(text, str(config_path))
    except (yaml.YAMLError, json.JSONDecodeError) as e:
        raise InputFormatError(
            f"Cannot parse configuration file {config_path}: {e}", str(config_path)
        ) from e

    if not isinstance(custom_config, dict):
        raise ValueError(f"Configuration file {config_path} must hold a mapping")
    return Config(custom_config)
