"""Seeded synthetic demo data so examples and tests run offline.

The price panel is a 3-variable fat-tailed VAR driven by a common t(3)
factor (tails co-move more than the center, so tail spillovers exceed
median spillovers); the uncertainty panel holds four positive index
series. Both span 144 monthly stamps.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from .panel import TimeSeriesPanel

DEMO_SEED = 31204
N_MONTHS = 144
PRICE_COLUMNS = ("mkt_a", "mkt_b", "mkt_c")
INDEX_COLUMNS = ("epu", "cpu", "tpu", "gpr")


def month_range(n: int = N_MONTHS, start: str = "2012-01") -> np.ndarray:
    months = np.arange(np.datetime64(start, "M"), np.datetime64(start, "M") + n)
    return months.astype("datetime64[D]")


def factor_var_returns(n_obs: int, rng: np.random.Generator,
                       n_series: int = 3, own: float = 0.15,
                       loading: float = 1.0, idio_scale: float = 0.8,
                       df: float = 3.0, scale: float = 0.03) -> np.ndarray:
    """Returns from a VAR(1) with a common heavy-tailed shock factor."""
    B = own * np.eye(n_series)
    f = rng.standard_t(df, size=n_obs)
    u = rng.standard_t(df, size=(n_obs, n_series)) * idio_scale
    eps = scale * (loading * f[:, None] + u)
    r = np.zeros((n_obs, n_series))
    for t in range(1, n_obs):
        r[t] = B @ r[t - 1] + eps[t]
    return r


def demo_prices(seed: int = DEMO_SEED) -> TimeSeriesPanel:
    """144-month price panel with heavy-tailed, factor-coupled returns."""
    rng = np.random.default_rng(seed)
    rets = factor_var_returns(N_MONTHS, rng)
    prices = 100.0 * np.exp(np.cumsum(rets, axis=0))
    return TimeSeriesPanel(month_range(), PRICE_COLUMNS, prices)


def demo_uncertainty(seed: int = DEMO_SEED + 1) -> TimeSeriesPanel:
    """Four positive index series on the same monthly grid."""
    rng = np.random.default_rng(seed)
    n, k = N_MONTHS, len(INDEX_COLUMNS)
    x = np.zeros((n, k))
    shocks = 0.25 * rng.standard_normal((n, k)) + 0.15 * rng.standard_t(4, size=(n, k))
    for t in range(1, n):
        x[t] = 0.7 * x[t - 1] + shocks[t]
    levels = 100.0 * np.exp(x - x.mean(axis=0))
    return TimeSeriesPanel(month_range(), INDEX_COLUMNS, levels)


def _write(panel: TimeSeriesPanel, path: Path) -> None:
    frame = panel.to_frame()
    frame.index = frame.index.strftime("%Y-%m")
    frame.index.name = "date"
    frame.to_csv(path, float_format="%.10g")


def write_demo_files(directory: str | Path) -> tuple[Path, Path]:
    """Write demo_prices.csv / demo_uncertainty.csv into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    prices_path = directory / "demo_prices.csv"
    indices_path = directory / "demo_uncertainty.csv"
    _write(demo_prices(), prices_path)
    _write(demo_uncertainty(), indices_path)
    return prices_path, indices_path


if __name__ == "__main__":  # regenerate the bundled files
    import sys

    target = sys.argv[1] if len(sys.argv) > 1 else "data"
    for p in write_demo_files(target):
        print(p)
