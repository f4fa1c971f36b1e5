"""Minimal OLS machinery shared by the regression-based modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .errors import RankDeficiencyError


@dataclass(frozen=True)
class OlsFit:
    params: np.ndarray
    cov: np.ndarray          # sigma2 * (X'X)^-1
    stderr: np.ndarray
    tvalues: np.ndarray
    pvalues: np.ndarray      # two-sided, Student t with df_resid
    residuals: np.ndarray
    fitted: np.ndarray
    ssr: float
    sigma2: float            # ssr / df_resid
    df_resid: int
    nobs: int

    @property
    def rsquared(self) -> float:
        y = self.fitted + self.residuals
        tss = float(np.sum((y - y.mean()) ** 2))
        return 1.0 - self.ssr / tss if tss > 0 else 0.0


def ols(X: np.ndarray, y: np.ndarray) -> OlsFit:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    T, K = X.shape
    if T <= K:
        raise RankDeficiencyError(f"need T > K, got T={T}, K={K}")
    xtx = X.T @ X
    try:
        xtx_inv = np.linalg.inv(xtx)
    except np.linalg.LinAlgError:
        raise RankDeficiencyError("X'X is singular") from None
    # reject numerically rank-deficient designs that inv() let through
    if np.linalg.matrix_rank(X) < K:
        raise RankDeficiencyError("design matrix is rank deficient")
    params = xtx_inv @ (X.T @ y)
    fitted = X @ params
    resid = y - fitted
    ssr = float(resid @ resid)
    df = T - K
    sigma2 = ssr / df
    cov = sigma2 * xtx_inv
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        tvals = np.where(se > 0, params / se, np.inf * np.sign(params))
    pvals = 2.0 * sps.t.sf(np.abs(tvals), df=df)
    return OlsFit(params=params, cov=cov, stderr=se, tvalues=tvals,
                  pvalues=pvals, residuals=resid, fitted=fitted, ssr=ssr,
                  sigma2=sigma2, df_resid=df, nobs=T)


def wald_f(fit: OlsFit, R: np.ndarray, r: np.ndarray | float = 0.0) -> tuple[float, float]:
    """F test of R @ params = r; returns (statistic, p-value)."""
    R = np.atleast_2d(np.asarray(R, dtype=float))
    q = R.shape[0]
    rv = np.full(q, r, dtype=float) if np.isscalar(r) else np.asarray(r, dtype=float)
    diff = R @ fit.params - rv
    mid = R @ fit.cov @ R.T
    try:
        sol = np.linalg.solve(mid, diff)
    except np.linalg.LinAlgError:
        raise RankDeficiencyError("singular restriction covariance") from None
    stat = float(diff @ sol) / q
    pval = float(sps.f.sf(stat, q, fit.df_resid))
    return stat, pval


def bartlett_long_run_variance(u: np.ndarray, bandwidth: int) -> float:
    """Newey-West long-run variance with Bartlett weights and T divisor."""
    u = np.asarray(u, dtype=float).ravel()
    T = len(u)
    gamma0 = float(u @ u) / T
    lrv = gamma0
    for j in range(1, min(bandwidth, T - 1) + 1):
        gamma_j = float(u[j:] @ u[:-j]) / T
        lrv += 2.0 * (1.0 - j / (bandwidth + 1.0)) * gamma_j
    return lrv


def newey_west_bandwidth(T: int) -> int:
    """Default Bartlett bandwidth floor(4 (T/100)^(2/9))."""
    return int(np.floor(4.0 * (T / 100.0) ** (2.0 / 9.0)))
