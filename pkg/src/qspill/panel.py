"""Dated multivariate panels: CSV ingestion, log returns, descriptive stats.

A panel is an aligned (dates, values) pair with no missing entries; rows
that fail to parse are dropped at load time and counted rather than imputed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd
from scipy import stats as sps

from .errors import (
    DuplicateDateError,
    EmptyPanelError,
    MissingInputError,
    NonPositivePriceError,
    ShortSeriesError,
    UnknownColumnError,
    ZeroVarianceError,
)

DEFAULT_DATE_FORMAT = "%Y-%m"


@dataclass(frozen=True)
class TimeSeriesPanel:
    """Aligned T x N panel of dated observations.

    Dates are strictly increasing with no duplicates; ``values`` carries one
    column per entry of ``names`` and no missing cells. Instances are
    immutable (arrays are write-locked), so they are safe to share across
    concurrent estimations.
    """

    dates: np.ndarray  # datetime64[D], length T
    names: tuple[str, ...]
    values: np.ndarray  # float, T x N
    dropped_rows: int = 0

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        values = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        if values.ndim != 2:
            raise ValueError("values must be 2-D (T x N)")
        if len(dates) != values.shape[0]:
            raise ValueError("dates and values have mismatched lengths")
        if values.shape[1] != len(self.names):
            raise ValueError("names and value columns have mismatched lengths")
        if len(dates) > 1 and not (np.diff(dates.astype("int64")) > 0).all():
            raise DuplicateDateError("dates must be strictly increasing")
        if not np.isfinite(values).all():
            raise ValueError("panel values must be finite")
        dates.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def n_obs(self) -> int:
        return self.values.shape[0]

    @property
    def n_series(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        try:
            j = self.names.index(name)
        except ValueError:
            raise UnknownColumnError(f"no column named {name!r}") from None
        return self.values[:, j]

    def select(self, names: Sequence[str]) -> "TimeSeriesPanel":
        idx = [self.names.index(n) if n in self.names else -1 for n in names]
        missing = [n for n, i in zip(names, idx) if i < 0]
        if missing:
            raise UnknownColumnError(f"no column(s) named {missing}")
        return TimeSeriesPanel(self.dates, tuple(names), self.values[:, idx])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values, index=pd.DatetimeIndex(self.dates, name="date"),
                            columns=list(self.names))


@dataclass(frozen=True)
class DescriptiveStats:
    """Per-column moments plus the chi-square(2) normality test."""

    name: str
    mean: float
    std_dev: float        # sample, T-1 divisor
    skewness: float       # m3 / m2^(3/2)
    kurtosis: float       # m4 / m2^2, raw (Gaussian -> 3)
    jarque_bera_stat: float
    jarque_bera_pvalue: float
    n_obs: int


def load_panel(
    path: str | Path,
    date_column: str,
    value_columns: Sequence[str],
    date_format: str = DEFAULT_DATE_FORMAT,
) -> TimeSeriesPanel:
    """Read a delimited file into an aligned panel.

    Rows with an unparseable date or any missing/non-numeric value are
    dropped and counted in ``dropped_rows``. Rows are sorted by date; a
    duplicate stamp raises :class:`DuplicateDateError`.
    """
    path = Path(path)
    if not path.exists():
        raise MissingInputError(f"input file not found: {path}")
    raw = pd.read_csv(path, dtype=str)
    for col in [date_column, *value_columns]:
        if col not in raw.columns:
            raise UnknownColumnError(f"no column named {col!r} in {path.name}")

    def parse_date(s):
        try:
            return datetime.strptime(str(s).strip(), date_format)
        except (ValueError, TypeError):
            return None

    parsed = raw[date_column].map(parse_date)
    numeric = raw[list(value_columns)].apply(pd.to_numeric, errors="coerce")
    keep = parsed.notna() & numeric.notna().all(axis=1)
    dropped = int((~keep).sum())
    if not keep.any():
        raise EmptyPanelError(f"no complete rows survive parsing in {path.name}")

    dates = np.array([np.datetime64(d.date()) for d in parsed[keep]], dtype="datetime64[D]")
    values = numeric[keep].to_numpy(dtype=float)
    order = np.argsort(dates, kind="stable")
    dates, values = dates[order], values[order]
    if len(dates) > 1 and (np.diff(dates.astype("int64")) == 0).any():
        dup = dates[:-1][np.diff(dates.astype("int64")) == 0][0]
        raise DuplicateDateError(f"duplicate date {dup} in {path.name}")
    return TimeSeriesPanel(dates, tuple(value_columns), values, dropped_rows=dropped)


def log_returns(panel: TimeSeriesPanel) -> TimeSeriesPanel:
    """First differences of log levels; output drops the first row."""
    if panel.n_obs < 2:
        raise ShortSeriesError("log returns need at least 2 observations")
    bad = np.argwhere(panel.values <= 0)
    if bad.size:
        r, c = bad[0]
        raise NonPositivePriceError(panel.names[c], int(r), float(panel.values[r, c]))
    rets = np.diff(np.log(panel.values), axis=0)
    return TimeSeriesPanel(panel.dates[1:], panel.names, rets,
                           dropped_rows=panel.dropped_rows)


def describe(panel: TimeSeriesPanel) -> list[DescriptiveStats]:
    """Column-wise moments and Jarque-Bera normality tests.

    Skewness/kurtosis use population-style moment ratios (the same
    convention as the Jarque-Bera statistic (T/6)(S^2 + (K-3)^2/4));
    ``std_dev`` uses the T-1 divisor.
    """
    T = panel.n_obs
    if T < 4:
        raise ShortSeriesError("describe needs at least 4 observations")
    out = []
    for j, name in enumerate(panel.names):
        x = panel.values[:, j]
        m = x.mean()
        d = x - m
        m2 = np.mean(d**2)
        if m2 <= 0.0:
            raise ZeroVarianceError(f"column {name!r} is constant; moments undefined")
        skew = np.mean(d**3) / m2**1.5
        kurt = np.mean(d**4) / m2**2
        jb = T / 6.0 * (skew**2 + (kurt - 3.0) ** 2 / 4.0)
        out.append(
            DescriptiveStats(
                name=name,
                mean=float(m),
                std_dev=float(x.std(ddof=1)),
                skewness=float(skew),
                kurtosis=float(kurt),
                jarque_bera_stat=float(jb),
                jarque_bera_pvalue=float(sps.chi2.sf(jb, 2)),
                n_obs=T,
            )
        )
    return out


def pearson_correlation(panel: TimeSeriesPanel) -> tuple[np.ndarray, np.ndarray]:
    """Pairwise Pearson correlations with two-sided t-test p-values.

    Returns ``(corr, pvalues)``; p-values use the t transform with T-2
    degrees of freedom, 0.0 on the diagonal.
    """
    T = panel.n_obs
    if T < 3:
        raise ShortSeriesError("correlation needs at least 3 observations")
    if np.any(panel.values.std(axis=0) == 0.0):
        j = int(np.argwhere(panel.values.std(axis=0) == 0.0)[0])
        raise ZeroVarianceError(f"column {panel.names[j]!r} is constant")
    corr = np.corrcoef(panel.values, rowvar=False)
    corr = np.clip(corr, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    with np.errstate(divide="ignore"):
        t = corr * np.sqrt((T - 2) / np.maximum(1.0 - corr**2, 0.0))
    pvals = 2.0 * sps.t.sf(np.abs(t), df=T - 2)
    pvals[~np.isfinite(t)] = 0.0
    np.fill_diagonal(pvals, 0.0)
    return corr, pvals
