"""
Statistics reported alongside phi.

Correlations, rank statistics and ordinary least squares, all as point
estimates and test statistics (no p-values), plus the treatment-contrast
design used for quality classes and the hardware-change adjustment of a
phi time series.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from datetime import date, datetime
from typing import NamedTuple, Optional, Union

import numpy as np
import numpy.typing as npt
import pandas as pd
from scipy.stats import kendalltau, rankdata

from ..config.defaults import QUALITY_LEVELS
from ..core.models import RegressionFit
from ..exceptions import (
    BreakOutOfRange,
    EmptySample,
    LengthMismatch,
    RankDeficientDesign,
    ZeroVariance,
)

logger = logging.getLogger(__name__)

Numbers = Union[Sequence[float], npt.NDArray[np.float64]]
DateLike = Union[str, date, datetime, pd.Timestamp]


def _paired(x: Numbers, y: Numbers, minimum: int) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x, dtype=np.float64).ravel()
    b = np.asarray(y, dtype=np.float64).ravel()
    if a.size != b.size:
        raise LengthMismatch(f"Samples differ in length: {a.size} vs {b.size}")
    if a.size < minimum:
        raise LengthMismatch(f"Need at least {minimum} paired values, got {a.size}")
    return a, b


def pearson_r(x: Numbers, y: Numbers) -> float:
    """Product-moment correlation.

    Raises:
        LengthMismatch: If lengths differ or are below 3.
        ZeroVariance: If either sample is constant.
    """
    a, b = _paired(x, y, 3)
    da = a - a.mean()
    db = b - b.mean()
    denominator = math.sqrt(float(da @ da) * float(db @ db))
    if denominator == 0.0:
        raise ZeroVariance("Correlation is undefined for a constant sample")
    return float(np.clip(float(da @ db) / denominator, -1.0, 1.0))


def kendall_tau(x: Numbers, y: Numbers) -> float:
    """Kendall's tau-b (tie-corrected).

    Raises:
        LengthMismatch: If lengths differ or are below 2.
        ZeroVariance: If either sample is constant.
    """
    a, b = _paired(x, y, 2)
    tau, _ = kendalltau(a, b, variant="b")
    if math.isnan(tau):
        raise ZeroVariance("Kendall tau is undefined for a constant sample")
    return float(tau)


def wilcoxon_z(a: Numbers, b: Numbers) -> float:
    """Rank-sum z statistic, positive when ``b`` ranks above ``a``.

    Uses the normal approximation with tie-corrected variance; the sum is
    taken over ``b``'s mid-ranks in the pooled sample. Returns 0 when all
    values are tied.

    Raises:
        EmptySample: If either sample is empty.
    """
    first = np.asarray(a, dtype=np.float64).ravel()
    second = np.asarray(b, dtype=np.float64).ravel()
    if first.size == 0 or second.size == 0:
        raise EmptySample("Both samples need at least one value")
    n_a, n_b = first.size, second.size
    n = n_a + n_b
    ranks = rankdata(np.concatenate([first, second]))
    rank_sum = float(ranks[n_a:].sum())
    expected = n_b * (n + 1) / 2.0
    _, ties = np.unique(ranks, return_counts=True)
    tie_term = float((ties.astype(np.float64) ** 3 - ties).sum())
    correction = tie_term / (n * (n - 1)) if n > 1 else 0.0
    variance = n_a * n_b / 12.0 * ((n + 1) - correction)
    if variance <= 0.0:
        return 0.0
    return (rank_sum - expected) / math.sqrt(variance)


def pairwise_wilcoxon(
    values_by_level: Mapping[str, Numbers],
    pairs: Optional[Sequence[tuple[str, str]]] = None,
) -> dict[str, float]:
    """Wilcoxon z for pairs of levels, keyed ``"low-high"``.

    By default compares adjacent quality classes among those with data.
    """
    if pairs is None:
        present = [
            level for level in QUALITY_LEVELS if len(values_by_level.get(level, ())) > 0
        ]
        pairs = list(zip(present[:-1], present[1:]))
    return {
        f"{low}-{high}": wilcoxon_z(values_by_level[low], values_by_level[high])
        for low, high in pairs
    }


def quality_rank(label: str) -> int:
    """Position of a quality class in C < B < GA < A < FA."""
    try:
        return QUALITY_LEVELS.index(label)
    except ValueError:
        raise ValueError(
            f"Unknown quality class {label!r}; expected one of {QUALITY_LEVELS}"
        ) from None


def treatment_contrasts(
    values: Sequence[str],
    levels: Optional[Sequence[str]] = None,
    reference: Optional[str] = None,
    name: str = "x",
) -> pd.DataFrame:
    """Indicator columns for every level but the reference.

    Args:
        values: One categorical observation per row.
        levels: Level order; defaults to the sorted distinct values. Levels
            that never occur are dropped.
        reference: Omitted level; defaults to the first level present.
        name: Factor name, used for the column labels ``name[level]``.

    Raises:
        ValueError: If a value is not among ``levels``.
    """
    observed = [str(v) for v in values]
    order = list(levels) if levels is not None else sorted(set(observed))
    unknown = sorted(set(observed) - set(order))
    if unknown:
        raise ValueError(f"Values {unknown} are not levels of {name}")
    present = [level for level in order if level in set(observed)]
    if reference is not None:
        if reference not in present:
            raise ValueError(f"Reference level {reference!r} does not occur in {name}")
        present.remove(reference)
        present.insert(0, reference)
    factor = pd.Categorical(observed, categories=present)
    dummies = pd.get_dummies(factor, drop_first=True, dtype=float)
    dummies.columns = [f"{name}[{level}]" for level in dummies.columns]
    return dummies


def design_matrix(
    numeric: Mapping[str, Numbers],
    categorical: Optional[Mapping[str, Sequence[str]]] = None,
    levels: Optional[Mapping[str, Sequence[str]]] = None,
) -> tuple[npt.NDArray[np.float64], list[str]]:
    """Intercept, numeric covariates and treatment-contrast columns.

    For each categorical factor the first level of ``levels[factor]`` that
    occurs is the reference.

    Returns:
        The (n, p) design and its column names.
    """
    columns: dict[str, np.ndarray] = {}
    for key, column in numeric.items():
        columns[key] = np.asarray(column, dtype=np.float64)
    n_rows = {len(c) for c in columns.values()}
    for key, column in (categorical or {}).items():
        n_rows.add(len(column))
        dummies = treatment_contrasts(column, (levels or {}).get(key), name=key)
        for label in dummies.columns:
            columns[str(label)] = dummies[label].to_numpy(dtype=np.float64)
    if len(n_rows) > 1:
        raise LengthMismatch(f"Predictors differ in length: {sorted(n_rows)}")
    n = n_rows.pop() if n_rows else 0
    names = ["intercept", *columns]
    design = np.column_stack([np.ones(n), *columns.values()]) if n else np.ones((0, 1))
    return design, names


def ols_fit(
    design: npt.ArrayLike, y: Numbers, names: Optional[Sequence[str]] = None
) -> RegressionFit:
    """Ordinary least squares with classical standard errors.

    Args:
        design: (n, p) matrix, including the intercept column.
        y: n responses.
        names: Column names; defaults to ``x0..x{p-1}``.

    Raises:
        LengthMismatch: If ``y`` and ``design`` disagree on n.
        RankDeficientDesign: If n <= p or the design lacks full column rank.
    """
    X = np.asarray(design, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    response = np.asarray(y, dtype=np.float64).ravel()
    n, p = X.shape
    if response.size != n:
        raise LengthMismatch(f"{n} design rows but {response.size} responses")
    if n <= p:
        raise RankDeficientDesign(f"{n} observations cannot identify {p} coefficients")
    if np.linalg.matrix_rank(X) < p:
        raise RankDeficientDesign(f"Design with {p} columns is not of full column rank")
    labels = list(names) if names is not None else [f"x{i}" for i in range(p)]
    if len(labels) != p:
        raise LengthMismatch(f"{len(labels)} names for {p} design columns")

    beta, *_ = np.linalg.lstsq(X, response, rcond=None)
    residuals = response - X @ beta
    rss = float(residuals @ residuals)
    sigma2 = rss / (n - p)
    covariance = sigma2 * np.linalg.inv(X.T @ X)
    errors = np.sqrt(np.clip(np.diag(covariance), 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_values = beta / errors

    centered = response - response.mean()
    tss = float(centered @ centered)
    r_squared = 1.0 - rss / tss if tss > 0 else float("nan")
    adjusted = 1.0 - (1.0 - r_squared) * (n - 1) / (n - p)
    return RegressionFit(
        names=labels,
        coefficients=beta.tolist(),
        standard_errors=errors.tolist(),
        t_values=t_values.tolist(),
        r_squared=r_squared,
        r_squared_adjusted=adjusted,
        residuals=residuals.tolist(),
        n_observations=n,
    )


def decimal_year(when: DateLike) -> float:
    """Calendar date as a fractional year, e.g. 2012-07-02 -> 2012.5."""
    stamp = pd.Timestamp(when)
    if stamp.tzinfo is not None:
        stamp = stamp.tz_convert("UTC").tz_localize(None)
    start = pd.Timestamp(year=stamp.year, month=1, day=1)
    end = pd.Timestamp(year=stamp.year + 1, month=1, day=1)
    return stamp.year + (stamp - start) / (end - start)


class HardwareAdjustment(NamedTuple):
    adjusted: list[float]
    fit: RegressionFit

    @property
    def step(self) -> float:
        """Estimated jump in phi at the break."""
        return self.fit.coefficient("after_break")

    @property
    def slope(self) -> float:
        """Trend in phi per year."""
        return self.fit.coefficient("year")


def trend_fit(dates: Sequence[DateLike], phis: Numbers) -> RegressionFit:
    """Linear trend of phi per year."""
    years = [decimal_year(d) for d in dates]
    design, names = design_matrix({"year": years})
    return ols_fit(design, phis, names)


def hardware_adjust(
    dates: Sequence[DateLike], phis: Numbers, break_date: DateLike
) -> HardwareAdjustment:
    """Remove a step change in phi at ``break_date``.

    Fits ``phi ~ intercept + year + after_break`` and subtracts the
    ``after_break`` coefficient from every point on or after the break.
    Earlier points are returned unchanged.

    Raises:
        BreakOutOfRange: Unless some dates fall before and some on or after
            the break.
        LengthMismatch: If ``dates`` and ``phis`` differ in length.
    """
    values = np.asarray(phis, dtype=np.float64).ravel()
    if len(dates) != values.size:
        raise LengthMismatch(f"{len(dates)} dates but {values.size} phi values")
    years = np.array([decimal_year(d) for d in dates])
    cut = decimal_year(break_date)
    after = years >= cut
    if not after.any() or after.all():
        raise BreakOutOfRange(
            f"Break {pd.Timestamp(break_date).date()} is not inside the series "
            f"({years.min():.3f}..{years.max():.3f})"
        )
    design, names = design_matrix(
        {"year": years, "after_break": after.astype(np.float64)}
    )
    fit = ols_fit(design, values, names)
    adjusted = values.copy()
    adjusted[after] = values[after] - fit.coefficient("after_break")
    logger.info(
        f"Hardware adjustment: step {fit.coefficient('after_break'):+.4f}, "
        f"trend {fit.coefficient('year'):+.4f}/yr"
    )
    return HardwareAdjustment(adjusted=adjusted.tolist(), fit=fit)
