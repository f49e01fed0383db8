"""Group-phi run configuration management.

Resolves the parameters of one CLI run from defaults, an optional
configuration file and command-line flags (in that order of precedence),
and validates them.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from datetime import date
from pathlib import Path
from typing import Any, Optional, Union

import pandas as pd

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
    PHI_METHODS,
    SAMPLER_METHODS,
    WALK_CONTINUE_PROBABILITY,
    WINDOW_DAYS,
)
from .settings import DEFAULT_CONFIG, FIELD_PATHS, Config, load_config_file

logger = logging.getLogger(__name__)


@dataclass
class RunConfig:
    """Complete parameters of one run."""

    command: str = ""
    subcommand: Optional[str] = None
    inputs: list[str] = field(default_factory=list)
    output: Optional[str] = None

    # Turn encoding
    threshold: Optional[float] = None
    step_ms: int = DEFAULT_STEP_MS
    merge_gap_ms: int = DEFAULT_MERGE_GAP_MS
    crosstalk_margin: float = DEFAULT_CROSSTALK_MARGIN

    # Chat and edit encoding
    roster: list[str] = field(default_factory=list)
    window_days: list[int] = field(default_factory=lambda: list(WINDOW_DAYS))
    max_edits: Optional[int] = None

    # Packet encoding
    delta_ms: Optional[float] = None
    span_ms: Optional[float] = None
    nodes: list[str] = field(default_factory=list)

    # Phi
    method: Optional[str] = None
    tau: int = 1
    max_nodes: int = DEFAULT_NODE_CAP
    stabilize: bool = True

    # Sampling
    sampler: str = DEFAULT_SAMPLER
    goal: int = DEFAULT_GOAL
    replicates: int = DEFAULT_REPLICATES
    walk_continue_probability: float = WALK_CONTINUE_PROBABILITY
    fire_mean: float = FIRE_MEAN

    # Sweeps and statistics
    taus: list[int] = field(default_factory=lambda: list(DEFAULT_TAU_GRID))
    deltas: list[float] = field(default_factory=lambda: list(DEFAULT_DELTA_GRID_MS))
    break_date: str = DEFAULT_BREAK_DATE
    scores: Optional[str] = None

    # Execution
    seed: int = DEFAULT_SEED
    workers: int = 1
    deterministic: bool = False
    resume: bool = False

    def echo(self) -> dict[str, Any]:
        """Parameters as embedded in output metadata.

        The output location is left out and input paths are reduced to
        file names, so the same run written elsewhere echoes identically.
        """
        echoed = asdict(self)
        echoed.pop("output")
        echoed["inputs"] = [Path(p).name for p in self.inputs]
        if self.scores is not None:
            echoed["scores"] = Path(self.scores).name
        return echoed


def _as_list(value: Any) -> list[Any]:
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def _optional(value: Any, kind: type) -> Any:
    return None if value is None else kind(value)


class RunConfigManager:
    """Loads run configurations and provides defaults."""

    DEFAULT_CONFIG: dict[str, Any] = DEFAULT_CONFIG

    def load_config(
        self,
        config_path: Optional[Union[str, Path]] = None,
        overrides: Optional[dict[str, Any]] = None,
    ) -> RunConfig:
        """Resolve a run configuration.

        Args:
            config_path: Optional YAML, JSON or flat ``key=value`` file.
            overrides: Flag values; ``None`` entries are treated as unset.
                ``command``, ``subcommand``, ``inputs`` and ``output`` are
                taken from here.

        Returns:
            Validated RunConfig.

        Raises:
            FileNotFoundError: If ``config_path`` does not exist.
            ValueError: If a parameter is out of range.
        """
        if config_path:
            config = load_config_file(config_path)
            logger.info(f"Loaded run configuration from {config_path}")
        else:
            config = Config()

        flags = dict(overrides or {})
        run_keys = {
            key: flags.pop(key, None)
            for key in ("command", "subcommand", "inputs", "output")
        }
        unknown = sorted(k for k in flags if k.replace("-", "_") not in FIELD_PATHS)
        if unknown:
            raise ValueError(f"Unknown run parameters: {unknown}")
        config.update(flags)
        return self._parse_config(config, run_keys)

    def _parse_config(
        self, config: Config, run_keys: Optional[dict[str, Any]] = None
    ) -> RunConfig:
        """Parse configuration data into a RunConfig object.

        Args:
            config: Merged configuration.
            run_keys: Command, subcommand, inputs and output of the run.

        Returns:
            Parsed and validated RunConfig.
        """
        run_keys = run_keys or {}
        values = config.flatten()
        break_date = values["break_date"]
        if isinstance(break_date, date):
            break_date = break_date.isoformat()
        try:
            run = RunConfig(
                command=str(run_keys.get("command") or ""),
                subcommand=run_keys.get("subcommand"),
                inputs=[str(p) for p in _as_list(run_keys.get("inputs"))],
                output=_optional(run_keys.get("output"), str),
                threshold=_optional(values["threshold"], float),
                step_ms=int(values["step_ms"]),
                merge_gap_ms=int(values["merge_gap_ms"]),
                crosstalk_margin=float(values["crosstalk_margin"]),
                roster=[str(s) for s in _as_list(values["roster"])],
                window_days=[int(d) for d in _as_list(values["window_days"])],
                max_edits=_optional(values["max_edits"], int),
                delta_ms=_optional(values["delta_ms"], float),
                span_ms=_optional(values["span_ms"], float),
                nodes=[str(n) for n in _as_list(values["nodes"])],
                method=_optional(values["method"], str),
                tau=int(values["tau"]),
                max_nodes=int(values["max_nodes"]),
                stabilize=bool(values["stabilize"]),
                sampler=str(values["sampler"]),
                goal=int(values["goal"]),
                replicates=int(values["replicates"]),
                walk_continue_probability=float(values["walk_continue_probability"]),
                fire_mean=float(values["fire_mean"]),
                taus=[int(t) for t in _as_list(values["taus"])],
                deltas=[float(d) for d in _as_list(values["deltas"])],
                break_date=str(break_date),
                scores=_optional(values["scores"], str),
                seed=int(values["seed"]),
                workers=int(values["workers"]),
                deterministic=bool(values["deterministic"]),
                resume=bool(values["resume"]),
            )
        except (TypeError, ValueError) as e:
            raise ValueError(f"Invalid run parameter: {e}") from e

        self._validate_config(run)
        return run

    def _validate_config(self, config: RunConfig) -> None:
        """Validate configuration settings.

        Args:
            config: Configuration to validate.

        Raises:
            ValueError: If configuration is invalid.
        """
        if config.threshold is not None and config.threshold <= 0:
            raise ValueError(f"threshold must be positive, got {config.threshold}")
        if config.step_ms <= 0:
            raise ValueError(f"step_ms must be positive, got {config.step_ms}")
        if config.merge_gap_ms < 0:
            raise ValueError(f"merge_gap_ms must be non-negative, got {config.merge_gap_ms}")
        if not 0.0 <= config.crosstalk_margin <= 1.0:
            raise ValueError(
                f"crosstalk_margin must lie in [0, 1], got {config.crosstalk_margin}"
            )
        if not config.window_days or any(d <= 0 for d in config.window_days):
            raise ValueError(f"window_days must be positive, got {config.window_days}")
        if config.max_edits is not None and config.max_edits < 1:
            raise ValueError(f"max_edits must be at least 1, got {config.max_edits}")
        if config.delta_ms is not None and config.delta_ms <= 0:
            raise ValueError(f"delta_ms must be positive, got {config.delta_ms}")
        if config.span_ms is not None and config.span_ms <= 0:
            raise ValueError(f"span_ms must be positive, got {config.span_ms}")
        if config.method is not None and config.method not in PHI_METHODS:
            raise ValueError(f"Invalid method: {config.method}")
        if config.tau < 1:
            raise ValueError(f"tau must be at least 1, got {config.tau}")
        if config.max_nodes < 2:
            raise ValueError(f"max_nodes must be at least 2, got {config.max_nodes}")
        if config.sampler not in SAMPLER_METHODS:
            raise ValueError(f"Invalid sampler: {config.sampler}")
        if config.goal < 2:
            raise ValueError(f"goal must be at least 2, got {config.goal}")
        if config.replicates < 1:
            raise ValueError(f"replicates must be at least 1, got {config.replicates}")
        if not 0.0 < config.walk_continue_probability < 1.0:
            raise ValueError(
                "walk_continue_probability must lie in (0, 1), "
                f"got {config.walk_continue_probability}"
            )
        if config.fire_mean <= 0:
            raise ValueError(f"fire_mean must be positive, got {config.fire_mean}")
        if not config.taus or any(t < 1 for t in config.taus):
            raise ValueError(f"taus must be positive step counts, got {config.taus}")
        if not config.deltas or any(d <= 0 for d in config.deltas):
            raise ValueError(f"deltas must be positive, got {config.deltas}")
        if config.workers < 1:
            raise ValueError(f"workers must be at least 1, got {config.workers}")
        try:
            pd.Timestamp(config.break_date)
        except ValueError as e:
            raise ValueError(f"Invalid break_date {config.break_date!r}: {e}") from e

        logger.debug(
            f"Configuration validated: {config.command or 'library'} run, "
            f"seed {config.seed}, {config.workers} worker(s)"
        )

    def save_default_config(self, output_path: Union[str, Path]) -> None:
        """Save the default configuration as a flat ``key=value`` file.

        Args:
            output_path: Path where to save the configuration file.
        """
        defaults = RunConfig()
        lines = [
            "# group-phi run configuration",
            "# Flags given on the command line override these values.",
        ]
        for section, keys in self.DEFAULT_CONFIG.items():
            lines.append("")
            lines.append(f"# [{section}]")
            for key in keys:
                lines.append(f"{key} = {_flat_text(getattr(defaults, key))}")
        Path(output_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
        logger.info(f"Default configuration saved to {output_path}")


def _flat_text(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return ",".join(_flat_text(v) for v in value)
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)

