"""Linear quantile regression by interior-point check-loss minimization.

Solves min_b sum_t rho_tau(y_t - x_t'b) through the bounded-variable LP
dual with a Mehrotra predictor-corrector. Regressors are standardized
internally for conditioning and coefficients mapped back on exit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .errors import RankDeficiencyError

_STEP_SHRINK = 0.9995  # fraction-to-boundary factor


@dataclass(frozen=True)
class QrFit:
    """Result of a single quantile regression fit."""

    tau: float
    coefficients: np.ndarray  # intercept first when the design carries one
    residuals: np.ndarray
    objective: float          # attained check loss
    iterations: int
    converged: bool


def check_loss(u: np.ndarray, tau: float) -> float:
    """Pinball loss sum u_i (tau - 1{u_i < 0}); nonnegative, 0 iff u == 0."""
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie strictly in (0, 1)")
    u = np.asarray(u, dtype=float)
    return float(np.sum(u * (tau - (u < 0.0))))


def _standardize(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Center/scale non-constant columns; returns (Xs, shift, scale, icol).

    ``icol`` is the index of the first constant column (absorbs the
    centering shifts), or -1 when the design has none, in which case
    columns are only scaled.
    """
    T, K = X.shape
    col_range = X.max(axis=0) - X.min(axis=0)
    const_cols = np.flatnonzero(col_range == 0.0)
    icol = int(const_cols[0]) if const_cols.size else -1
    shift = np.zeros(K)
    scale = np.ones(K)
    for j in range(K):
        if col_range[j] == 0.0:
            continue
        sd = X[:, j].std()
        if sd > 0:
            scale[j] = sd
        if icol >= 0:
            shift[j] = X[:, j].mean()
    Xs = (X - shift) / scale
    return Xs, shift, scale, icol


def qr_fit(X: np.ndarray, y: np.ndarray, tau: float,
           tol: float = 1e-8, max_iter: int = 200) -> QrFit:
    """Fit a linear quantile regression at level ``tau``.

    ``X`` is the full T x K design (include a ones column for an
    intercept). Convergence is declared when the complementarity gap,
    scaled by (1 + objective), drops below ``tol``; on hitting
    ``max_iter`` the best iterate is returned with ``converged=False``.
    Degenerate problems (flat optimal faces) return the interior-point
    limit, a point of the optimal set rather than a particular vertex.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie strictly in (0, 1)")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2:
        raise ValueError("X must be 2-D")
    T, K = X.shape
    if y.shape[0] != T:
        raise ValueError("X and y have mismatched lengths")
    if T <= K:
        raise RankDeficiencyError(f"need T > K, got T={T}, K={K}")
    if np.linalg.matrix_rank(X) < K:
        raise RankDeficiencyError("design matrix is rank deficient")

    Xs, shift, scale, icol = _standardize(X)
    beta, niter, converged = _fn_interior_point(Xs, y, tau, tol, max_iter)

    # undo the internal standardization
    coef = beta / scale
    if icol >= 0:
        cval = X[0, icol]
        coef[icol] = beta[icol] - np.dot(beta / scale, shift) / cval
    resid = y - X @ coef
    return QrFit(
        tau=float(tau),
        coefficients=coef,
        residuals=resid,
        objective=check_loss(resid, tau),
        iterations=niter,
        converged=converged,
    )


def _solve_normal(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        c, low = sla.cho_factor(M, check_finite=False)
        return sla.cho_solve((c, low), rhs, check_finite=False)
    except sla.LinAlgError:
        return np.linalg.lstsq(M, rhs, rcond=None)[0]


def _fn_interior_point(X: np.ndarray, y: np.ndarray, tau: float,
                       tol: float, max_iter: int) -> tuple[np.ndarray, int, bool]:
    """Primal-dual predictor-corrector on max{y'a | X'a=(1-tau)X'1, 0<=a<=1}.

    The multiplier on the equality constraint is the coefficient vector of
    the original problem; complementarity gap a'z + s'w is the LP duality
    gap used for termination.
    """
    T, K = X.shape
    a = np.full(T, 1.0 - tau)
    s = 1.0 - a
    beta = _solve_normal(X.T @ X, X.T @ y)
    r = y - X @ beta
    # w pairs with the upper bound (positive residuals), z with the lower;
    # w - z = r keeps the start dual-feasible.
    eps0 = 1e-5 * max(1.0, float(np.mean(np.abs(r))))
    w = np.maximum(r, 0.0) + eps0
    z = np.maximum(-r, 0.0) + eps0

    best = beta.copy()
    best_obj = check_loss(r, tau)
    gap = a @ z + s @ w

    for it in range(1, max_iter + 1):
        r = y - X @ beta
        obj = check_loss(r, tau)
        if obj < best_obj:
            best_obj, best = obj, beta.copy()
        if gap <= tol * (1.0 + abs(obj)):
            return beta, it - 1, True

        q = 1.0 / (z / a + w / s)
        Xq = X * q[:, None]
        M = X.T @ Xq

        # predictor (affine scaling, mu = 0)
        dnu = _solve_normal(M, Xq.T @ r)
        da = q * (r - X @ dnu)
        dz = -z - (z / a) * da
        dw = -w + (w / s) * da
        ap = _max_step(a, da, s, -da)
        ad = _max_step(z, dz, w, dw)

        gap_aff = (a + ap * da) @ (z + ad * dz) + (s - ap * da) @ (w + ad * dw)
        mu = (max(gap_aff, 0.0) / gap) ** 3 * gap / (2.0 * T)

        # corrector with second-order complementarity terms
        cz = (mu - da * dz) / a
        cw = (mu + da * dw) / s   # ds_aff = -da
        g = r + cz - cw
        dnu = _solve_normal(M, Xq.T @ g)
        da = q * (g - X @ dnu)
        dz = cz - z - (z / a) * da
        dw = cw - w + (w / s) * da
        ap = _max_step(a, da, s, -da)
        ad = _max_step(z, dz, w, dw)

        a = a + ap * da
        s = s - ap * da
        beta = beta + ad * dnu
        z = np.maximum(z + ad * dz, 1e-300)
        w = np.maximum(w + ad * dw, 1e-300)
        gap = a @ z + s @ w

    r = y - X @ beta
    if check_loss(r, tau) < best_obj:
        best = beta
    return best, max_iter, False


def _max_step(u: np.ndarray, du: np.ndarray, v: np.ndarray, dv: np.ndarray) -> float:
    """Largest step in [0,1] keeping u+α·du and v+α·dv positive, shrunk."""
    alpha = 1.0
    neg = du < 0
    if neg.any():
        alpha = min(alpha, float(np.min(-u[neg] / du[neg])) * _STEP_SHRINK)
    neg = dv < 0
    if neg.any():
        alpha = min(alpha, float(np.min(-v[neg] / dv[neg])) * _STEP_SHRINK)
    return alpha
