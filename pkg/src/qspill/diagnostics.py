"""Residual adequacy battery: serial correlation, heteroskedasticity,
functional form, and parameter stability.

All four tests take the estimation design directly so they apply to any
least-squares fit in the toolkit; the CLI attaches them to every ARDL-type
run automatically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from ._ols import ols
from .errors import InfeasibleConfigError, RankDeficiencyError, ZeroVarianceError

# Boundary slope parameters of the recursive-residual cumulative-sum test.
_CUSUM_A = {0.10: 0.850, 0.05: 0.948, 0.01: 1.143}


@dataclass(frozen=True)
class TestResult:
    statistic: float
    pvalue: float
    df: tuple[int, ...] = ()


@dataclass(frozen=True)
class CusumResult:
    max_normalized_excursion: float   # max_t |W_t| / boundary_t
    crossed: bool                     # boundary crossed at the chosen level
    pvalue: float                     # boundary-crossing approximation
    significance: float


@dataclass(frozen=True)
class DiagnosticsReport:
    bg: TestResult
    bp: TestResult
    reset: TestResult
    cusum: CusumResult


def _has_intercept(X: np.ndarray) -> bool:
    return bool(np.any(np.all(X == X[0, :], axis=0) & (X[0, :] != 0.0)))


def breusch_godfrey(residuals, design, order: int = 1) -> TestResult:
    """LM test of residual autocorrelation up to ``order``.

    Auxiliary regression of the residuals on the original design plus
    ``order`` own lags (zero-padded); statistic T R^2 ~ chi2(order).
    """
    if order < 1:
        raise InfeasibleConfigError("autocorrelation order must be >= 1")
    u = np.asarray(residuals, dtype=float).ravel()
    X = np.asarray(design, dtype=float)
    T, K = X.shape
    if len(u) != T:
        raise InfeasibleConfigError("residuals and design have mismatched lengths")
    if T <= K + order:
        raise InfeasibleConfigError("too few observations for the requested order")
    lags = np.zeros((T, order))
    for j in range(1, order + 1):
        lags[j:, j - 1] = u[:-j]
    aux = ols(np.hstack([X, lags]), u)
    stat = T * aux.rsquared
    return TestResult(float(stat), float(sps.chi2.sf(stat, order)), (order,))


def breusch_pagan(residuals, design) -> TestResult:
    """LM test of heteroskedasticity: squared scaled residuals on the design.

    Statistic T R^2 ~ chi2(K - 1); the design must contain an intercept.
    """
    u = np.asarray(residuals, dtype=float).ravel()
    X = np.asarray(design, dtype=float)
    T, K = X.shape
    if len(u) != T:
        raise InfeasibleConfigError("residuals and design have mismatched lengths")
    if K < 2 or not _has_intercept(X):
        raise InfeasibleConfigError("design must include an intercept and a regressor")
    s2 = float(u @ u) / T
    if s2 <= 0:
        raise ZeroVarianceError("residuals are identically zero")
    aux = ols(X, u**2 / s2)
    stat = T * aux.rsquared
    return TestResult(float(stat), float(sps.chi2.sf(stat, K - 1)), (K - 1,))


def ramsey_reset(y, design, powers: tuple[int, ...] = (2, 3)) -> TestResult:
    """F test on powers of the fitted values added to the regression."""
    y = np.asarray(y, dtype=float).ravel()
    X = np.asarray(design, dtype=float)
    if not powers or any(p < 2 for p in powers):
        raise InfeasibleConfigError("powers must all be >= 2")
    base = ols(X, y)
    yhat = base.fitted
    sd = yhat.std()
    if sd <= 0:
        raise ZeroVarianceError("fitted values are constant")
    z = (yhat - yhat.mean()) / sd  # affine rescaling leaves the test invariant
    aug = np.column_stack([z**p for p in powers])
    full = ols(np.hstack([X, aug]), y)
    m = len(powers)
    num = (base.ssr - full.ssr) / m
    if full.ssr <= 0:
        raise RankDeficiencyError("augmented regression fits exactly")
    stat = num / (full.ssr / full.df_resid)
    return TestResult(float(stat), float(sps.f.sf(stat, m, full.df_resid)),
                      (m, full.df_resid))


def recursive_residuals(y, design) -> np.ndarray:
    """Standardized one-step-ahead recursive residuals.

    The recursion starts at the shortest leading block with full column
    rank (regressors such as event dummies may be identically zero early
    in the sample), yielding T - t0 residuals.
    """
    y = np.asarray(y, dtype=float).ravel()
    X = np.asarray(design, dtype=float)
    T, K = X.shape
    if T <= K + 1:
        raise InfeasibleConfigError("need T > K + 1 for recursive residuals")
    t0 = K
    while t0 < T and np.linalg.matrix_rank(X[:t0]) < K:
        t0 += 1
    if t0 >= T - 1:
        raise RankDeficiencyError("no full-rank leading block for the recursion")
    X0 = X[:t0]
    M = np.linalg.inv(X0.T @ X0)
    xty = X0.T @ y[:t0]
    w = np.empty(T - t0)
    for t in range(t0, T):
        x = X[t]
        b = M @ xty
        f = 1.0 + x @ M @ x
        if f <= 1e-12:
            raise RankDeficiencyError("near-singular recursive update")
        w[t - t0] = (y[t] - x @ b) / np.sqrt(f)
        Mx = M @ x
        M = M - np.outer(Mx, Mx) / f
        xty = xty + x * y[t]
    return w


def _crossing_probability(a: float) -> float:
    """Two-sided probability that a Brownian path crosses +-a(1 + 2u)."""
    q = sps.norm.sf(3.0 * a) + np.exp(-4.0 * a * a) * sps.norm.cdf(a)
    return float(min(1.0, 2.0 * q))


def cusum(y, design, significance: float = 0.05) -> CusumResult:
    """Recursive-residual cumulative-sum stability test.

    The cumulative sum of standardized recursive residuals is compared to
    the straight boundaries +-a(sqrt(T-K) + 2(t-K)/sqrt(T-K)). The scalar
    reported is the maximum excursion normalized by the boundary; the
    p-value maps that excursion through the boundary-crossing
    approximation (a stand-in for a test with no exact finite-sample
    p-value).
    """
    if significance not in _CUSUM_A:
        raise InfeasibleConfigError(
            f"significance must be one of {sorted(_CUSUM_A)}, got {significance}"
        )
    w = recursive_residuals(y, design)
    m = len(w)
    sigma = w.std(ddof=1)
    if sigma <= 0:
        raise ZeroVarianceError("recursive residuals are constant")
    W = np.cumsum(w) / sigma
    a = _CUSUM_A[significance]
    r = np.arange(1, m + 1)
    bound = a * np.sqrt(m) + 2.0 * a * r / np.sqrt(m)
    excursion = float(np.max(np.abs(W) / bound))
    return CusumResult(
        max_normalized_excursion=excursion,
        crossed=excursion > 1.0,
        pvalue=_crossing_probability(a * excursion),
        significance=significance,
    )


def diagnose(y, design, bg_order: int = 1) -> DiagnosticsReport:
    """Full battery on a least-squares problem (y, design)."""
    fit = ols(np.asarray(design, dtype=float), np.asarray(y, dtype=float))
    return DiagnosticsReport(
        bg=breusch_godfrey(fit.residuals, design, order=bg_order),
        bp=breusch_pagan(fit.residuals, design),
        reset=ramsey_reset(y, design),
        cusum=cusum(y, design),
    )
