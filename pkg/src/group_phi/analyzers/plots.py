"""
SVG charts of sweeps, quality levels and adjusted phi series.

Figures are built with the object-oriented matplotlib API (no pyplot state),
so charts can be drawn from worker threads. With ``deterministic=True`` the
SVG carries no creation date and uses a fixed id salt, making repeated
runs byte-identical.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Optional, Union

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from ..config.defaults import QUALITY_LEVELS
from ..core.models import SweepResult
from .statistics import DateLike, HardwareAdjustment, decimal_year, trend_fit

logger = logging.getLogger(__name__)

SVG_SALT = "group-phi"

PathLike = Union[str, Path]

_AXIS_LABELS = {
    "tau": "Time delay tau (steps)",
    "delta_ms": "Time step size delta (ms)",
}


def _save(figure: Figure, path: PathLike, deterministic: bool) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if deterministic else None
    salt = SVG_SALT if deterministic else None
    with matplotlib.rc_context({"svg.hashsalt": salt}):
        figure.savefig(target, format="svg", metadata=metadata)
    logger.info(f"Wrote chart {target}")
    return target


def plot_sweep(
    result: SweepResult,
    path: PathLike,
    title: Optional[str] = None,
    deterministic: bool = False,
) -> Path:
    """Mean phi with standard-error bars over the swept parameter."""
    figure = Figure(figsize=(6.0, 4.0))
    axes = figure.add_subplot()
    x = np.asarray(result.parameter_values)
    axes.errorbar(
        x,
        result.mean_phi,
        yerr=np.nan_to_num(result.stderr_phi),
        marker="o",
        capsize=3,
        color="black",
    )
    axes.axvline(result.argmax, linestyle=":", color="grey")
    if result.parameter == "delta_ms" and x.size > 1 and x.min() > 0:
        axes.set_xscale("log")
    axes.set_xlabel(_AXIS_LABELS[result.parameter])
    axes.set_ylabel("Average phi (bits)")
    if title:
        axes.set_title(title)
    figure.tight_layout()
    return _save(figure, path, deterministic)


def plot_quality_levels(
    values_by_level: Mapping[str, Sequence[float]],
    path: PathLike,
    title: Optional[str] = None,
    deterministic: bool = False,
) -> Path:
    """Mean phi and standard error for each quality class with data."""
    levels = [
        level for level in QUALITY_LEVELS if len(values_by_level.get(level, ())) > 0
    ]
    means, errors = [], []
    for level in levels:
        values = np.asarray(values_by_level[level], dtype=np.float64)
        means.append(float(values.mean()))
        errors.append(
            float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
        )
    figure = Figure(figsize=(6.0, 4.0))
    axes = figure.add_subplot()
    axes.errorbar(
        range(len(levels)), means, yerr=errors, marker="o", capsize=3, color="black"
    )
    axes.set_xticks(range(len(levels)))
    axes.set_xticklabels(levels)
    axes.set_xlabel("Quality class after change")
    axes.set_ylabel("Average phi (bits)")
    if title:
        axes.set_title(title)
    figure.tight_layout()
    return _save(figure, path, deterministic)


def plot_adjusted_series(
    dates: Sequence[DateLike],
    raw: Sequence[float],
    path: PathLike,
    adjustment: Optional[HardwareAdjustment] = None,
    title: Optional[str] = None,
    deterministic: bool = False,
) -> Path:
    """Phi over time with its trend line, before and after adjustment."""
    years = np.array([decimal_year(d) for d in dates])
    figure = Figure(figsize=(7.0, 4.0))
    axes = figure.add_subplot()
    series = [("raw", raw, "grey")]
    if adjustment is not None:
        series.append(("adjusted", adjustment.adjusted, "black"))
    for label, values, color in series:
        axes.plot(years, values, "o", color=color, label=f"phi ({label})")
        if len(values) > 2:
            fit = trend_fit(list(dates), values)
            line = fit.coefficient("intercept") + fit.coefficient("year") * years
            axes.plot(
                years,
                line,
                "-",
                color=color,
                label=f"trend ({label}): {fit.coefficient('year'):+.3f}/yr",
            )
    axes.set_xlabel("Year")
    axes.set_ylabel("Average phi (bits)")
    axes.legend(loc="best", fontsize="small")
    if title:
        axes.set_title(title)
    figure.tight_layout()
    return _save(figure, path, deterministic)
