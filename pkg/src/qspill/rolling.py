"""Rolling-window re-estimation of spillover tables and robustness sweeps.

Windows are counted in observations. Failed windows leave gaps (NaN) in the
derived series rather than interpolated values; their reasons are kept.
Model fits are cached per (window size, position, tau) so sweeping the
forecast horizon never re-runs quantile regression.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .connectedness import SpilloverTable, fit_qvar, gfevd, spillover_indices
from .errors import InfeasibleConfigError
from .panel import TimeSeriesPanel


@dataclass(frozen=True)
class RollingConfig:
    window: int
    horizon: int = 12
    taus: tuple[float, ...] = (0.05, 0.5, 0.95)
    lags: int = 1

    def validate(self, panel: TimeSeriesPanel) -> None:
        n, p = panel.n_series, self.lags
        if self.window > panel.n_obs:
            raise InfeasibleConfigError(
                f"window {self.window} exceeds panel length {panel.n_obs}"
            )
        if self.window <= n * p + p + 1:
            raise InfeasibleConfigError(
                f"window {self.window} too small for N={n}, p={p}"
            )
        if self.horizon < 1:
            raise InfeasibleConfigError("horizon must be >= 1")
        for t in self.taus:
            if not 0.0 < t < 1.0:
                raise InfeasibleConfigError(f"tau={t} outside (0, 1)")


@dataclass(frozen=True)
class WindowResult:
    """Spillover tables (or failure reasons) for one window end."""

    date: np.datetime64
    tables: dict[float, SpilloverTable]
    failures: dict[float, str] = field(default_factory=dict)


@dataclass(frozen=True)
class RollingSeries:
    """Dated sequence of per-window spillover tables for one configuration."""

    config: RollingConfig
    names: tuple[str, ...]
    dates: np.ndarray                 # window-end stamps, length T - window + 1
    windows: tuple[WindowResult, ...]

    def tsi(self, tau: float) -> np.ndarray:
        """Total spillover per window; NaN where the window failed."""
        out = np.full(len(self.windows), np.nan)
        for i, w in enumerate(self.windows):
            if tau in w.tables:
                out[i] = w.tables[tau].tsi
        return out

    def net(self, tau: float) -> np.ndarray:
        """Per-window net spillovers, (T - window + 1) x N with NaN gaps."""
        out = np.full((len(self.windows), len(self.names)), np.nan)
        for i, w in enumerate(self.windows):
            if tau in w.tables:
                out[i] = w.tables[tau].net
        return out

    def rtd(self, upper: float = 0.95, lower: float = 0.05) -> np.ndarray:
        """Relative tail dependence series: TSI(upper) - TSI(lower)."""
        return self.tsi(upper) - self.tsi(lower)


@dataclass(frozen=True)
class RobustnessResult:
    """Cross-product sweep output keyed by (window, horizon)."""

    series: dict[tuple[int, int], RollingSeries]
    fit_count: int


def _window_panel(panel: TimeSeriesPanel, start: int, window: int) -> TimeSeriesPanel:
    sl = slice(start, start + window)
    return TimeSeriesPanel(panel.dates[sl], panel.names, panel.values[sl])


def _roll(panel: TimeSeriesPanel, window: int, taus, lags: int,
          horizons) -> tuple[dict[int, list[WindowResult]], int]:
    """Shared engine: one model fit per (position, tau), reused per horizon."""
    n_windows = panel.n_obs - window + 1
    per_horizon: dict[int, list[WindowResult]] = {h: [] for h in horizons}
    fits = 0
    for start in range(n_windows):
        sub = _window_panel(panel, start, window)
        date = panel.dates[start + window - 1]
        tables: dict[int, dict[float, SpilloverTable]] = {h: {} for h in horizons}
        failures: dict[int, dict[float, str]] = {h: {} for h in horizons}
        for tau in taus:
            try:
                model = fit_qvar(sub, tau, lags)
                fits += 1
            except Exception as exc:
                reason = f"{type(exc).__name__}: {exc}"
                for h in horizons:
                    failures[h][tau] = reason
                continue
            for h in horizons:
                try:
                    tables[h][tau] = spillover_indices(gfevd(model, h))
                except Exception as exc:
                    failures[h][tau] = f"{type(exc).__name__}: {exc}"
        for h in horizons:
            per_horizon[h].append(WindowResult(date, tables[h], failures[h]))
    return per_horizon, fits


def rolling_spillovers(panel: TimeSeriesPanel, config: RollingConfig) -> RollingSeries:
    """Re-estimate the spillover pipeline on every length-``window`` slice."""
    config.validate(panel)
    per_horizon, _ = _roll(panel, config.window, config.taus, config.lags,
                           [config.horizon])
    windows = tuple(per_horizon[config.horizon])
    dates = panel.dates[config.window - 1:]
    return RollingSeries(config=config, names=panel.names, dates=dates,
                         windows=windows)


def robustness_sweep(panel: TimeSeriesPanel, windows, horizons, taus,
                     lags: int = 1) -> RobustnessResult:
    """Full (window x horizon) cross-product of rolling runs.

    Quantile VAR fits are shared across horizons for a given window size,
    so ``fit_count`` scales with windows and taus only.
    """
    windows = [int(w) for w in windows]
    horizons = [int(h) for h in horizons]
    taus = tuple(float(t) for t in taus)
    for w in windows:
        for h in horizons:
            RollingConfig(window=w, horizon=h, taus=taus, lags=lags).validate(panel)
    series: dict[tuple[int, int], RollingSeries] = {}
    total_fits = 0
    for w in windows:
        per_horizon, fits = _roll(panel, w, taus, lags, horizons)
        total_fits += fits
        dates = panel.dates[w - 1:]
        for h in horizons:
            cfg = RollingConfig(window=w, horizon=h, taus=taus, lags=lags)
            series[(w, h)] = RollingSeries(
                config=cfg, names=panel.names, dates=dates,
                windows=tuple(per_horizon[h]),
            )
    return RobustnessResult(series=series, fit_count=total_fits)
