"""ADF, Phillips-Perron, and KPSS tests with embedded critical values.

Deterministic specs follow the two cases reported in applied work:
``intercept`` and ``trend`` (trend and intercept). ADF selects its lag
order by minimizing the Schwarz criterion over a common sample; PP and
KPSS use a Bartlett-kernel long-run variance with the Newey-West default
bandwidth floor(4 (T/100)^(2/9)) unless overridden.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._ols import bartlett_long_run_variance, newey_west_bandwidth, ols
from .errors import InfeasibleConfigError, ShortSeriesError, ZeroVarianceError

SPECS = ("intercept", "trend")

# MacKinnon (2010) response-surface coefficients, univariate case:
# cv(T) = b0 + b1/T + b2/T^2 + b3/T^3, keyed by significance level.
_MACKINNON = {
    "intercept": {
        0.01: (-3.43035, -6.5393, -16.786, -79.433),
        0.05: (-2.86154, -2.8903, -4.234, -40.040),
        0.10: (-2.56677, -1.5384, -2.809, 0.0),
    },
    "trend": {
        0.01: (-3.95877, -9.0531, -28.428, -134.155),
        0.05: (-3.41049, -4.3904, -9.036, -45.374),
        0.10: (-3.12705, -2.5856, -3.925, -22.380),
    },
}

# Kwiatkowski-Phillips-Schmidt-Shin (1992) level-stationarity critical values.
_KPSS_CV = {
    "intercept": {0.01: 0.739, 0.05: 0.463, 0.10: 0.347},
    "trend": {0.01: 0.216, 0.05: 0.146, 0.10: 0.119},
}

_LEVELS = (0.01, 0.05, 0.10)


@dataclass(frozen=True)
class UnitRootResult:
    test: str                      # adf | pp | kpss
    statistic: float
    spec: str                      # intercept | trend
    lags_or_bandwidth: int
    critical_values: dict[float, float]
    rejects: dict[float, bool]     # null rejected at each level
    band: str                      # e.g. "p<0.05" / "p>0.10"
    nobs: int

    @property
    def stars(self) -> str:
        if self.rejects[0.01]:
            return "***"
        if self.rejects[0.05]:
            return "**"
        if self.rejects[0.10]:
            return "*"
        return ""


def _check_series(y: np.ndarray, min_obs: int = 20) -> np.ndarray:
    y = np.asarray(y, dtype=float).ravel()
    if len(y) < min_obs:
        raise ShortSeriesError(f"need at least {min_obs} observations, got {len(y)}")
    if np.ptp(y) == 0.0:
        raise ZeroVarianceError("series is constant")
    return y


def _check_spec(spec: str) -> str:
    if spec not in SPECS:
        raise InfeasibleConfigError(f"spec must be one of {SPECS}, got {spec!r}")
    return spec


def _deterministics(T: int, spec: str) -> np.ndarray:
    cols = [np.ones(T)]
    if spec == "trend":
        cols.append(np.arange(1.0, T + 1.0))
    return np.column_stack(cols)


def _mackinnon_cv(spec: str, nobs: int) -> dict[float, float]:
    out = {}
    for lvl, (b0, b1, b2, b3) in _MACKINNON[spec].items():
        out[lvl] = b0 + b1 / nobs + b2 / nobs**2 + b3 / nobs**3
    return out


def _band(rejects: dict[float, bool]) -> str:
    for lvl in _LEVELS:
        if rejects[lvl]:
            return f"p<{lvl:g}"
    return "p>0.1"


def adf_test(series, spec: str = "intercept", max_lags: int | None = None) -> UnitRootResult:
    """Augmented Dickey-Fuller t-test on the lagged-level coefficient.

    The augmentation order is chosen by the smallest Schwarz criterion over
    0..max_lags, all candidates scored on the sample aligned at max_lags;
    the chosen order is then refitted on its own maximal sample.
    """
    y = _check_series(series)
    spec = _check_spec(spec)
    T = len(y)
    if max_lags is None:
        max_lags = min(int(np.floor(12.0 * (T / 100.0) ** 0.25)), T // 3 - 1)
    if max_lags < 0 or max_lags >= T / 3:
        raise InfeasibleConfigError(f"max_lags must satisfy 0 <= max_lags < T/3, got {max_lags}")

    dy = np.diff(y)

    def design(k: int, offset: int):
        # rows t = offset..len(dy)-1 of: dy_t ~ y_{t-1} + dy_{t-1..t-k} + det
        rows = len(dy) - offset
        cols = [y[offset:-1]]
        for i in range(1, k + 1):
            cols.append(dy[offset - i:len(dy) - i])
        cols.append(_deterministics(rows, spec))
        return np.column_stack([np.column_stack(cols[:-1]), cols[-1]]), dy[offset:]

    best_k, best_sic = 0, np.inf
    for k in range(max_lags + 1):
        X, resp = design(k, max_lags)
        fit = ols(X, resp)
        n = fit.nobs
        sic = n * np.log(fit.ssr / n) + X.shape[1] * np.log(n)
        if sic < best_sic - 1e-12:
            best_sic, best_k = sic, k
    X, resp = design(best_k, best_k)
    fit = ols(X, resp)
    stat = float(fit.tvalues[0])
    cvs = _mackinnon_cv(spec, fit.nobs)
    rejects = {lvl: stat < cvs[lvl] for lvl in _LEVELS}
    return UnitRootResult("adf", stat, spec, best_k, cvs, rejects,
                          _band(rejects), fit.nobs)


def pp_test(series, spec: str = "intercept", bandwidth: int | None = None) -> UnitRootResult:
    """Phillips-Perron Z-tau test with Bartlett-kernel HAC correction."""
    y = _check_series(series)
    spec = _check_spec(spec)
    dy = np.diff(y)
    n = len(dy)
    X = np.column_stack([y[:-1], _deterministics(n, spec)])
    fit = ols(X, dy)
    u = fit.residuals
    if bandwidth is None:
        bandwidth = newey_west_bandwidth(n)
    bandwidth = min(bandwidth, n // 2)
    gamma0 = float(u @ u) / n
    lam2 = bartlett_long_run_variance(u, bandwidth)
    lam2 = max(lam2, 1e-12 * gamma0)
    tau = float(fit.tvalues[0])
    se = float(fit.stderr[0])
    s = np.sqrt(fit.sigma2)
    stat = np.sqrt(gamma0 / lam2) * tau - (lam2 - gamma0) * n * se / (2.0 * np.sqrt(lam2) * s)
    cvs = _mackinnon_cv(spec, n)
    rejects = {lvl: stat < cvs[lvl] for lvl in _LEVELS}
    return UnitRootResult("pp", float(stat), spec, bandwidth, cvs, rejects,
                          _band(rejects), n)


def kpss_test(series, spec: str = "intercept", bandwidth: int | None = None) -> UnitRootResult:
    """KPSS stationarity test (null: stationary around the chosen trend)."""
    y = _check_series(series)
    spec = _check_spec(spec)
    T = len(y)
    D = _deterministics(T, spec)
    e = ols(D, y).residuals
    S = np.cumsum(e)
    if bandwidth is None:
        bandwidth = newey_west_bandwidth(T)
    bandwidth = min(bandwidth, T // 2)
    lam2 = bartlett_long_run_variance(e, bandwidth)
    if lam2 <= 0:
        raise ZeroVarianceError("long-run variance is not positive")
    stat = float(np.sum(S**2) / (T**2 * lam2))
    cvs = dict(_KPSS_CV[spec])
    rejects = {lvl: stat > cvs[lvl] for lvl in _LEVELS}
    return UnitRootResult("kpss", stat, spec, bandwidth, cvs, rejects,
                          _band(rejects), T)
