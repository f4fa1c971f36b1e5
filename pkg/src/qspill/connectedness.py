"""Quantile VAR estimation, generalized FEVD, and spillover indices.

Each VAR equation is fitted independently by quantile regression at a
common level tau; forecast-error variance shares are the ordering-invariant
generalized decomposition, row-normalized to percent, from which the total,
directional, and net spillover summaries derive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, InfeasibleConfigError, ZeroVarianceError
from .panel import TimeSeriesPanel
from .qr import QrFit, qr_fit


@dataclass(frozen=True)
class QvarModel:
    """Quantile VAR(p) fit at a single quantile level."""

    tau: float
    p: int
    names: tuple[str, ...]
    intercept: np.ndarray          # N
    coefficients: np.ndarray       # p x N x N, coefficients[k] = B_{k+1}
    residuals: np.ndarray          # (T-p) x N
    sigma: np.ndarray              # N x N residual covariance, T-p divisor
    spectral_radius: float
    stable: bool
    equation_fits: tuple[QrFit, ...] = field(repr=False, default=())

    @property
    def n_series(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class FevdMatrix:
    """Generalized FEVD at horizon H: raw shares and the row-normalized
    percent matrix (rows sum to 100)."""

    horizon: int
    names: tuple[str, ...]
    raw: np.ndarray
    normalized: np.ndarray
    tau: float
    stable: bool


@dataclass(frozen=True)
class SpilloverTable:
    """Total/directional/net spillover summaries of a normalized FEVD."""

    tau: float
    horizon: int
    names: tuple[str, ...]
    matrix: np.ndarray       # normalized percent FEVD
    tsi: float
    to_others: np.ndarray
    from_others: np.ndarray
    net: np.ndarray
    inc_own: np.ndarray
    stable: bool


@dataclass(frozen=True)
class SweepResult:
    """Per-tau spillover tables; failed levels carry the error message."""

    tables: dict[float, SpilloverTable]
    failures: dict[float, str]


def lag_design(values: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Build (X, Y) for a VAR(p): X = [1, y_{t-1}, ..., y_{t-p}]."""
    T, N = values.shape
    Y = values[p:]
    cols = [np.ones((T - p, 1))]
    for k in range(1, p + 1):
        cols.append(values[p - k:T - k])
    return np.hstack(cols), Y


def companion_spectral_radius(coefficients: np.ndarray) -> float:
    """Spectral radius of the VAR companion matrix."""
    p, N, _ = coefficients.shape
    F = np.zeros((N * p, N * p))
    for k in range(p):
        F[:N, k * N:(k + 1) * N] = coefficients[k]
    if p > 1:
        F[N:, :-N] = np.eye(N * (p - 1))
    return float(np.max(np.abs(np.linalg.eigvals(F))))


def fit_qvar(panel: TimeSeriesPanel, tau: float, p: int = 1) -> QvarModel:
    """Estimate a quantile VAR(p) equation by equation.

    The residual covariance uses the T-p divisor. Explosive estimates are
    flagged via ``stable`` rather than rejected.
    """
    if p < 1:
        raise InfeasibleConfigError("lag order p must be >= 1")
    T, N = panel.values.shape
    if N < 2:
        raise InfeasibleConfigError("quantile VAR needs N >= 2 series")
    if T - p <= N * p + 1:
        raise InfeasibleConfigError(
            f"insufficient observations: T-p={T - p} <= N*p+1={N * p + 1}"
        )
    X, Y = lag_design(panel.values, p)
    fits = []
    for i in range(N):
        fit = qr_fit(X, Y[:, i], tau)
        if not fit.converged:
            raise ConvergenceError(
                f"quantile regression did not converge at tau={tau}", equation=i
            )
        fits.append(fit)
    coef = np.array([f.coefficients for f in fits])  # N x (1 + N*p)
    intercept = coef[:, 0].copy()
    B = np.empty((p, N, N))
    for k in range(p):
        B[k] = coef[:, 1 + k * N:1 + (k + 1) * N]
    resid = np.column_stack([f.residuals for f in fits])
    centered = resid - resid.mean(axis=0)
    sigma = centered.T @ centered / resid.shape[0]
    rho = companion_spectral_radius(B)
    return QvarModel(
        tau=float(tau), p=p, names=panel.names, intercept=intercept,
        coefficients=B, residuals=resid, sigma=sigma,
        spectral_radius=rho, stable=bool(rho < 1.0), equation_fits=tuple(fits),
    )


def ma_coefficients(model: QvarModel, horizon: int) -> np.ndarray:
    """Moving-average matrices psi_0..psi_{H-1} via the lag recursion."""
    if horizon < 1:
        raise InfeasibleConfigError("horizon must be >= 1")
    N, p = model.n_series, model.p
    psi = np.zeros((horizon, N, N))
    psi[0] = np.eye(N)
    for h in range(1, horizon):
        acc = np.zeros((N, N))
        for k in range(1, min(h, p) + 1):
            acc += model.coefficients[k - 1] @ psi[h - k]
        psi[h] = acc
    return psi


def gfevd(model: QvarModel, horizon: int) -> FevdMatrix:
    """Generalized forecast-error variance decomposition at ``horizon``.

    Raw share (i <- j): sigma_jj^{-1} sum_h (e_i' psi_h Sigma e_j)^2 over
    sum_h e_i' psi_h Sigma psi_h' e_i; rows are then normalized to sum
    to 100.
    """
    sigma = model.sigma
    diag = np.diag(sigma)
    if np.any(diag <= 0.0):
        j = int(np.argwhere(diag <= 0.0)[0])
        raise ZeroVarianceError(
            f"residual variance of {model.names[j]!r} is not strictly positive"
        )
    psi = ma_coefficients(model, horizon)
    num = np.zeros_like(sigma)
    den = np.zeros(model.n_series)
    for h in range(horizon):
        ps = psi[h] @ sigma
        num += ps**2
        den += np.einsum("ij,ij->i", ps, psi[h])
    raw = num / diag[None, :] / den[:, None]
    normalized = 100.0 * raw / raw.sum(axis=1, keepdims=True)
    return FevdMatrix(
        horizon=horizon, names=model.names, raw=raw, normalized=normalized,
        tau=model.tau, stable=model.stable,
    )


def spillover_indices(fevd: FevdMatrix) -> SpilloverTable:
    """Total, directional, and net spillovers from a normalized FEVD.

    from_i is the off-diagonal row sum (what i receives), to_i the
    off-diagonal column sum (what i transmits); the total index is the mean
    received share, and net = to - from sums to zero by construction.
    """
    W = fevd.normalized
    own = np.diag(W)
    from_others = W.sum(axis=1) - own
    to_others = W.sum(axis=0) - own
    net = to_others - from_others
    tsi = float(from_others.mean())
    return SpilloverTable(
        tau=fevd.tau, horizon=fevd.horizon, names=fevd.names, matrix=W,
        tsi=tsi, to_others=to_others, from_others=from_others, net=net,
        inc_own=to_others + own, stable=fevd.stable,
    )


def spillover_pipeline(panel: TimeSeriesPanel, tau: float, p: int,
                       horizon: int) -> SpilloverTable:
    """fit -> FEVD -> summary, the unit of work for sweeps and windows."""
    return spillover_indices(gfevd(fit_qvar(panel, tau, p), horizon))


def quantile_sweep(panel: TimeSeriesPanel, taus, p: int = 1,
                   horizon: int = 12) -> SweepResult:
    """Run the full pipeline independently for each quantile level.

    Per-tau failures are collected, not raised, so a sweep survives
    individual hard levels.
    """
    taus = [float(t) for t in taus]
    for t in taus:
        if not 0.0 < t < 1.0:
            raise InfeasibleConfigError(f"tau={t} outside (0, 1)")
    if panel.n_series < 2:
        raise InfeasibleConfigError("quantile sweep needs N >= 2 series")
    tables: dict[float, SpilloverTable] = {}
    failures: dict[float, str] = {}
    for t in taus:
        try:
            tables[t] = spillover_pipeline(panel, t, p, horizon)
        except Exception as exc:  # isolate per-tau failures
            failures[t] = f"{type(exc).__name__}: {exc}"
    return SweepResult(tables=tables, failures=failures)


def relative_tail_dependence(upper: SpilloverTable, lower: SpilloverTable) -> float:
    """Signed gap between upper-tail and lower-tail total spillovers."""
    return float(upper.tsi - lower.tsi)
