"""
group-phi stats command

Correlations, rank statistics, least squares and the hardware adjustment
over columns of a CSV table (for example a pipeline's per-window table).
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Optional

import pandas as pd

from ..analyzers.statistics import (
    design_matrix,
    hardware_adjust,
    kendall_tau,
    ols_fit,
    pairwise_wilcoxon,
    pearson_r,
    quality_rank,
)
from ..config.defaults import QUALITY_LEVELS
from ..utils.io_utils import dumps_json, output_metadata, read_columns, write_json
from . import common

logger = logging.getLogger(__name__)

TESTS = ("corr", "tau", "wilcoxon", "ols", "adjust")


def add_parser(subparsers: common.SubParsers) -> argparse.ArgumentParser:
    """Add stats command parser.

    Args:
        subparsers: Subparser action to add the stats command to.

    Returns:
        Configured ArgumentParser for the stats command.
    """
    parser: argparse.ArgumentParser = subparsers.add_parser(
        "stats",
        help="Statistics over columns of a CSV table",
        description=(
            "corr: Pearson r of --x and --y. tau: Kendall tau-b of --x and --y "
            "(quality labels are ranked C < B < GA < A < FA). wilcoxon: rank-sum "
            "z of --value between --group levels. ols: --y on --numeric and "
            "--categorical columns. adjust: step adjustment of --y over --date "
            "at --break-date."
        ),
    )
    parser.add_argument("test", choices=TESTS, help="Statistic to compute")
    parser.add_argument("--input", "-i", required=True, help="CSV table")
    parser.add_argument("--x", help="First column (corr, tau)")
    parser.add_argument("--y", help="Second column (corr, tau) or response (ols, adjust)")
    parser.add_argument("--value", help="Measured column (wilcoxon)")
    parser.add_argument("--group", help="Grouping column (wilcoxon)")
    parser.add_argument(
        "--pair",
        nargs=2,
        action="append",
        metavar=("LOW", "HIGH"),
        help="Group pair to compare; repeatable (default: adjacent quality classes)",
    )
    parser.add_argument(
        "--numeric", type=common.name_list, default=[], help="Numeric predictors (ols)"
    )
    parser.add_argument(
        "--categorical",
        type=common.name_list,
        default=[],
        help="Categorical predictors, first level as reference (ols)",
    )
    parser.add_argument("--date", help="Date column (adjust)")
    parser.add_argument("--break-date", help="Hardware change date (default: 2012-03-01)")
    common.add_common_arguments(parser, "Output JSON (default: stdout)")
    return parser


def _need(args: argparse.Namespace, *names: str) -> list[str]:
    missing = [f"--{n.replace('_', '-')}" for n in names if not getattr(args, n)]
    if missing:
        raise ValueError(f"stats {args.test} needs {' '.join(missing)}")
    return [getattr(args, n) for n in names]


def _is_quality(column: pd.Series) -> bool:
    if pd.api.types.is_numeric_dtype(column):
        return False
    return set(column.astype(str)) <= set(QUALITY_LEVELS)


def ranked(column: pd.Series) -> list[float]:
    """Numeric values, with quality labels replaced by their rank."""
    if _is_quality(column):
        return [float(quality_rank(label)) for label in column.astype(str)]
    return pd.to_numeric(column).astype(float).tolist()


def levels_for(column: pd.Series) -> Optional[list[str]]:
    """Quality order for quality columns, else sorted distinct values."""
    if _is_quality(column):
        return list(QUALITY_LEVELS)
    return None


def compute(args: argparse.Namespace, break_date: str) -> dict[str, Any]:
    """Run the selected statistic on the input table."""
    if args.test in ("corr", "tau"):
        x, y = _need(args, "x", "y")
        table = read_columns(args.input, [x, y]).dropna()
        statistic = pearson_r if args.test == "corr" else kendall_tau
        return {
            "statistic": "pearson_r" if args.test == "corr" else "kendall_tau_b",
            "x": x,
            "y": y,
            "n": len(table),
            "value": statistic(ranked(table[x]), ranked(table[y])),
        }

    if args.test == "wilcoxon":
        value, group = _need(args, "value", "group")
        table = read_columns(args.input, [value, group]).dropna()
        by_level = {
            str(level): pd.to_numeric(rows[value]).astype(float).tolist()
            for level, rows in table.groupby(group, sort=True)
        }
        pairs: Optional[list[tuple[str, str]]] = None
        if args.pair:
            pairs = [(low, high) for low, high in args.pair]
        elif not _is_quality(table[group]):
            levels = list(by_level)
            pairs = list(zip(levels[:-1], levels[1:]))
        return {
            "statistic": "wilcoxon_z",
            "value": value,
            "group": group,
            "n": {level: len(v) for level, v in by_level.items()},
            "z": pairwise_wilcoxon(by_level, pairs),
        }

    if args.test == "ols":
        (y,) = _need(args, "y")
        columns = [y, *args.numeric, *args.categorical]
        table = read_columns(args.input, columns).dropna()
        numeric = {c: pd.to_numeric(table[c]).astype(float).tolist() for c in args.numeric}
        categorical = {c: table[c].astype(str).tolist() for c in args.categorical}
        levels = {
            c: lv for c in args.categorical if (lv := levels_for(table[c])) is not None
        }
        design, names = design_matrix(numeric, categorical, levels)
        fit = ols_fit(design, pd.to_numeric(table[y]).astype(float).tolist(), names)
        return {"statistic": "ols", "response": y, "fit": fit}

    date, y = _need(args, "date", "y")
    table = read_columns(args.input, [date, y]).dropna()
    adjustment = hardware_adjust(
        table[date].astype(str).tolist(),
        pd.to_numeric(table[y]).astype(float).tolist(),
        break_date,
    )
    return {
        "statistic": "hardware_adjustment",
        "break_date": break_date,
        "step": adjustment.step,
        "slope_per_year": adjustment.slope,
        "adjusted": adjustment.adjusted,
        "fit": adjustment.fit,
    }


def main(args: argparse.Namespace) -> int:
    """Stats command entry point.

    Args:
        args: Parsed command line arguments.

    Returns:
        Exit code.
    """
    inputs = common.check_inputs([args.input])
    config = common.resolve_config(args, "stats", args.test, inputs)
    result = compute(args, config.break_date)
    logger.info(f"Computed {result['statistic']} on {args.input}")

    if config.output:
        write_json(config.output, result, config.seed, config.echo())
    else:
        payload = output_metadata(config.seed, config.echo())
        payload["result"] = result
        sys.stdout.write(dumps_json(payload))
    return common.EXIT_OK
