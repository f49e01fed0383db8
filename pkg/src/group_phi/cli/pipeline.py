"""
group-phi pipeline command

End-to-end runs of the three studies: speaking turns or chat of small
groups (study1), Wikipedia edit windows (study2) and packet captures over
time (study3). Every run writes its state matrices under
``<output>/matrices/`` so that ``--resume`` can pick them up again.
"""

from __future__ import annotations

import argparse
import logging
import re
from datetime import date
from functools import partial
from pathlib import Path
from typing import Any, Callable, Optional, cast

import pandas as pd

from ..analyzers.plots import plot_adjusted_series, plot_quality_levels
from ..analyzers.statistics import (
    design_matrix,
    hardware_adjust,
    kendall_tau,
    ols_fit,
    pairwise_wilcoxon,
    pearson_r,
    quality_rank,
    trend_fit,
)
from ..analyzers.sweeps import (
    phi_or_none,
    sample_encoder,
    sweep_step_size,
    sweep_time_delay,
)
from ..config.defaults import PACKET_TAU, QUALITY_LEVELS
from ..config.run_config import RunConfig
from ..core.models import PhiMethod, PhiResult
from ..core.stability import averaged_phi
from ..core.state import StateMatrix
from ..encoders import BaseEncoder, ChatEncoder, PacketEncoder, encode_edits
from ..exceptions import GroupPhiError, NoValidResults
from ..sampling import build_packet_graph, replicate_samples
from ..utils.io_utils import read_columns, write_json, write_table
from ..utils.parallel import ordered_map
from . import common
from .encode import chat_encoder, edit_encoder, turn_encoder, window_file_name
from .sample import sample_config
from .sweep import write_sweep_outputs

logger = logging.getLogger(__name__)

STUDIES = ("study1", "study2", "study3")
MATRIX_DIR = "matrices"
CAPTURE_DATE = re.compile(r"^(\d{4}-\d{2}-\d{2})")


def add_parser(subparsers: common.SubParsers) -> argparse.ArgumentParser:
    """Add pipeline command parser.

    Args:
        subparsers: Subparser action to add the pipeline command to.

    Returns:
        Configured ArgumentParser for the pipeline command.
    """
    parser: argparse.ArgumentParser = subparsers.add_parser(
        "pipeline",
        help="Run a complete study from raw logs",
        description=(
            "study1: per-group volume or chat CSVs -> tau sweep and per-group phi "
            "(optionally correlated with --scores). study2: edit log -> phi per "
            "quality window with Kendall tau, Wilcoxon z and OLS per window "
            "length. study3: dated packet CSVs -> delta sweep, averaged phi per "
            "capture and the trend with the hardware-change adjustment."
        ),
    )
    parser.add_argument("study", choices=STUDIES, help="Study to run")
    parser.add_argument(
        "--input", "-i", required=True, nargs="+", help="Input logs of the study"
    )
    parser.add_argument("--taus", type=common.int_list, help="Delays for study1")
    parser.add_argument(
        "--deltas", type=common.float_list, help="Step sizes in ms for study3"
    )
    parser.add_argument("--scores", help="CSV of group,score for study1")
    parser.add_argument("--break-date", help="Hardware change date for study3")
    common.add_common_arguments(parser, "Output directory")
    common.add_resume_argument(parser)
    common.add_phi_arguments(parser)
    common.add_sampling_arguments(parser)
    common.add_turn_arguments(parser)
    common.add_chat_arguments(parser)
    common.add_edit_arguments(parser)
    common.add_packet_arguments(parser)
    return parser


def guarded(label: str, compute: Callable[[], Any]) -> Any:
    """Result of ``compute``, or an error entry when the data cannot support it."""
    try:
        return compute()
    except (GroupPhiError, ValueError) as e:
        logger.warning(f"Skipping {label}: {e}")
        return {"error": type(e).__name__, "message": str(e)}


def _phi_fields(result: Optional[PhiResult]) -> dict[str, Any]:
    if result is None:
        return {"phi": float("nan"), "valid": False, "n_dropped": 0}
    return {
        "phi": result.value,
        "valid": result.valid,
        "n_dropped": len(result.dropped_nodes),
    }


def group_encoder(path: str, config: RunConfig) -> BaseEncoder:
    """Chat encoder for chat logs, turn encoder for volume tracks."""
    if ChatEncoder().can_encode(path):
        return chat_encoder(config)
    return turn_encoder(config)


def run_study1(config: RunConfig, output: Path) -> dict[str, Any]:
    method = cast(PhiMethod, config.method or "empirical")
    names = [Path(path).stem for path in config.inputs]
    groups = [
        common.cached_matrix(
            output / MATRIX_DIR / f"{name}.csv",
            partial(group_encoder(path, config).encode_file, path),
            config,
        )
        for name, path in zip(names, config.inputs)
    ]
    logger.info(f"Encoded {len(groups)} groups")

    sweep = sweep_time_delay(
        groups,
        config.taus,
        method=method,
        max_nodes=config.max_nodes,
        stabilize=config.stabilize,
        workers=config.workers,
    )
    write_sweep_outputs(sweep, output, config)
    best_tau = int(sweep.argmax)

    compute = partial(
        phi_or_none,
        tau=best_tau,
        method=method,
        max_nodes=config.max_nodes,
        stabilize=config.stabilize,
    )
    results = ordered_map(compute, groups, config.workers)
    table = pd.DataFrame(
        [
            {"group": name, "n_nodes": states.n_nodes, **_phi_fields(result)}
            for name, states, result in zip(names, groups, results)
        ]
    )
    write_table(table, output / "groups.csv", config.seed, config.echo())

    summary: dict[str, Any] = {
        "study": "study1",
        "method": method,
        "best_tau": best_tau,
        "best_tau_seconds": (
            best_tau * groups[0].step_duration_ms / 1000.0
            if groups[0].step_duration_ms
            else None
        ),
        "n_groups": len(groups),
        "mean_phi": sweep.mean_phi[sweep.parameter_values.index(sweep.argmax)],
    }
    if config.scores:
        summary["score_correlation"] = guarded(
            "score correlation", partial(score_correlation, table, config.scores)
        )
    return summary


def score_correlation(table: pd.DataFrame, scores_path: str) -> dict[str, Any]:
    """Pearson r between each valid group's phi and its score."""
    scores = read_columns(scores_path, ["group", "score"])
    scores["group"] = scores["group"].astype(str)
    merged = table[table["valid"]].merge(scores, on="group", how="inner")
    return {
        "n": len(merged),
        "pearson_r": pearson_r(merged["phi"].tolist(), merged["score"].tolist()),
    }


def window_statistics(rows: pd.DataFrame) -> dict[str, Any]:
    """Quality statistics of the valid windows of one window length."""
    valid = rows[rows["valid"]]
    by_level = {
        level: valid.loc[valid["new_quality"] == level, "phi"].tolist()
        for level in QUALITY_LEVELS
    }

    def ols() -> Any:
        design, names = design_matrix(
            {
                "editors": valid["n_editors"].astype(float).tolist(),
                "edits_per_editor": valid["edits_per_editor"].tolist(),
            },
            {"quality": valid["new_quality"].tolist()},
            {"quality": list(QUALITY_LEVELS)},
        )
        return ols_fit(design, valid["phi"].tolist(), names)

    return {
        "n_windows": len(rows),
        "n_valid": len(valid),
        "n_per_quality": {level: len(v) for level, v in by_level.items()},
        "kendall_tau": guarded(
            "Kendall tau",
            lambda: kendall_tau(
                valid["phi"].tolist(), [quality_rank(q) for q in valid["new_quality"]]
            ),
        ),
        "wilcoxon_z": guarded("Wilcoxon z", lambda: pairwise_wilcoxon(by_level)),
        "ols": guarded("OLS fit", ols),
    }


def run_study2(config: RunConfig, output: Path) -> dict[str, Any]:
    method = cast(PhiMethod, config.method or "atomic")
    encoder = edit_encoder(config)
    windows = encoder.windows(encoder.load(config.inputs[0]))
    if not windows:
        raise NoValidResults("The edit log has no quality window with enough editors")

    rows: list[dict[str, Any]] = []
    counters: dict[tuple[str, int], int] = {}
    matrices: list[StateMatrix] = []
    for window in windows:
        key = (window.article, window.window_days)
        counters[key] = counters.get(key, 0) + 1
        name = window_file_name(window.article, window.window_days, counters[key])
        matrices.append(
            common.cached_matrix(
                output / MATRIX_DIR / name,
                partial(encode_edits, window),
                config,
            )
        )
        rows.append(
            {
                "file": name,
                "article": window.article,
                "window_days": window.window_days,
                "new_quality": window.new_quality,
                "change_time": window.change_time.isoformat(),
                "n_editors": len(window.editors),
                "n_edits": len(window.edits),
                "edits_per_editor": len(window.edits) / len(window.editors),
            }
        )

    compute = partial(
        phi_or_none,
        tau=config.tau,
        method=method,
        max_nodes=config.max_nodes,
        stabilize=config.stabilize,
    )
    results = ordered_map(compute, matrices, config.workers)
    table = pd.DataFrame(
        [{**row, **_phi_fields(result)} for row, result in zip(rows, results)]
    )
    write_table(table, output / "windows.csv", config.seed, config.echo())

    statistics: dict[str, Any] = {}
    for days, rows_of_length in table.groupby("window_days", sort=True):
        statistics[f"{days}d"] = window_statistics(rows_of_length)
        valid = rows_of_length[rows_of_length["valid"]]
        plot_quality_levels(
            {q: valid.loc[valid["new_quality"] == q, "phi"].tolist() for q in QUALITY_LEVELS},
            output / f"quality_{days}d.svg",
            title=f"{days}-day windows",
            deterministic=config.deterministic,
        )
    return {
        "study": "study2",
        "method": method,
        "tau": config.tau,
        "window_days": statistics,
    }


def capture_label(path: str, index: int) -> tuple[str, Optional[date]]:
    """Capture name and the date of a ``YYYY-MM-DD`` file-name prefix."""
    stem = Path(path).stem
    match = CAPTURE_DATE.match(stem)
    if match is None:
        return stem or f"capture_{index:03d}", None
    try:
        return stem, date.fromisoformat(match.group(1))
    except ValueError:
        return stem, None


def capture_phi(
    frame: pd.DataFrame,
    name: str,
    delta_ms: float,
    config: RunConfig,
    output: Path,
) -> tuple[float, float, int]:
    """Averaged phi over the node samples of one capture."""
    method = cast(PhiMethod, config.method or "atomic")
    samples = replicate_samples(
        build_packet_graph(frame), sample_config(config), config.replicates, config.workers
    )
    encode = sample_encoder(frame, delta_ms, config.span_ms)
    matrices = [
        common.cached_matrix(
            output / MATRIX_DIR / f"{name}_r{i:03d}.csv", partial(encode, sample), config
        )
        for i, sample in enumerate(samples)
    ]
    compute = partial(
        phi_or_none,
        tau=PACKET_TAU,
        method=method,
        max_nodes=config.max_nodes,
        stabilize=config.stabilize,
    )
    results = ordered_map(compute, matrices, config.workers)
    try:
        average = averaged_phi(r for r in results if r is not None)
    except NoValidResults:
        logger.warning(f"No valid phi for capture {name}")
        return float("nan"), float("nan"), 0
    return average.mean, average.stderr, average.n_valid


def series_trend(
    table: pd.DataFrame, dated: bool, break_date: str, output: Path, config: RunConfig
) -> dict[str, Any]:
    """Hardware adjustment when the break lies inside the dates, else a trend."""
    valid = table[table["n_valid"] > 0]
    if not dated:
        design, names = design_matrix({"capture": valid.index.astype(float).tolist()})
        fit = guarded("trend fit", lambda: ols_fit(design, valid["phi"].tolist(), names))
        return {"trend": fit}

    dates = valid["date"].tolist()
    phis = valid["phi"].tolist()
    cut = pd.Timestamp(break_date)
    stamps = pd.to_datetime(pd.Series(dates))
    if len(valid) and (stamps < cut).any() and (stamps >= cut).any():
        adjustment = guarded(
            "hardware adjustment", lambda: hardware_adjust(dates, phis, break_date)
        )
        if isinstance(adjustment, dict):
            return {"hardware_adjustment": adjustment}
        table.loc[valid.index, "phi_adjusted"] = adjustment.adjusted
        plot_adjusted_series(
            dates,
            phis,
            output / "phi_series.svg",
            adjustment,
            deterministic=config.deterministic,
        )
        return {
            "break_date": break_date,
            "step": adjustment.step,
            "slope_per_year": adjustment.slope,
            "hardware_adjustment": adjustment.fit,
            "trend_adjusted": guarded(
                "adjusted trend", lambda: trend_fit(dates, adjustment.adjusted)
            ),
        }

    logger.info(f"Break {break_date} is outside the capture dates; fitting a plain trend")
    if len(valid) > 1:
        plot_adjusted_series(
            dates, phis, output / "phi_series.svg", deterministic=config.deterministic
        )
    return {"trend": guarded("trend fit", lambda: trend_fit(dates, phis))}


def run_study3(config: RunConfig, output: Path) -> dict[str, Any]:
    method = cast(PhiMethod, config.method or "atomic")
    encoder = PacketEncoder()
    labels = [capture_label(path, i) for i, path in enumerate(config.inputs)]
    captures = [encoder.load(path) for path in config.inputs]

    summary: dict[str, Any] = {"study": "study3", "method": method}
    if config.delta_ms is None:
        sweep = sweep_step_size(
            captures,
            sample_config(config),
            config.deltas,
            config.replicates,
            span_ms=config.span_ms,
            method=method,
            max_nodes=config.max_nodes,
            stabilize=config.stabilize,
            workers=config.workers,
        )
        write_sweep_outputs(sweep, output, config)
        delta_ms = sweep.argmax
        summary["delta_source"] = "sweep"
    else:
        delta_ms = config.delta_ms
        summary["delta_source"] = "config"
    summary["delta_ms"] = delta_ms
    logger.info(f"Computing capture phi at delta={delta_ms:g} ms")

    rows = []
    for (name, when), frame in zip(labels, captures):
        mean, stderr, n_valid = capture_phi(frame, name, delta_ms, config, output)
        rows.append(
            {
                "capture": name,
                "date": when.isoformat() if when else "",
                "phi": mean,
                "stderr": stderr,
                "n_valid": n_valid,
                "phi_adjusted": mean,
            }
        )
    table = pd.DataFrame(rows)
    dated = all(when is not None for _, when in labels)
    summary.update(series_trend(table, dated, config.break_date, output, config))
    summary["n_captures"] = len(rows)
    write_table(table, output / "phi_series.csv", config.seed, config.echo())
    return summary


def main(args: argparse.Namespace) -> int:
    """Pipeline command entry point.

    Args:
        args: Parsed command line arguments.

    Returns:
        Exit code.
    """
    inputs = common.check_inputs(args.input)
    if args.scores:
        common.check_inputs([args.scores])
    config = common.resolve_config(args, "pipeline", args.study, inputs)
    output = common.require_output(config)
    logger.info(f"Running {args.study} on {len(inputs)} input(s)")

    runners: dict[str, Callable[[RunConfig, Path], dict[str, Any]]] = {
        "study1": run_study1,
        "study2": run_study2,
        "study3": run_study3,
    }
    summary = runners[args.study](config, output)
    write_json(output / "summary.json", summary, config.seed, config.echo())
    logger.info(f"{args.study} finished; results in {output}")
    return common.EXIT_OK
