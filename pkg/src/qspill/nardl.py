"""Asymmetric ARDL: partial-sum decomposition and Wald asymmetry tests.

Each forcing variable splits into cumulative positive and negative moves;
the pair enters the model under a single shared lag order, while dummies
stay symmetric. Long-run asymmetry is tested as equality of the paired
level coefficients, short-run asymmetry as equality of the summed
difference-term coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._ols import wald_f
from .ardl import ArdlFit, ArdlSpec, fit_ardl
from .ardl import select_lags_aic as _ardl_select
from .errors import ShortSeriesError

POS_SUFFIX = "_pos"
NEG_SUFFIX = "_neg"

SHORT_RUN_WALD_CONVENTION = "sum_of_difference_coefficients"


@dataclass(frozen=True)
class PartialSumPair:
    """Cumulative positive/negative increments of a series.

    ``positive``/``negative`` hold the partial sums for t = 1..T-1 (the
    t = 0 values are identically zero and omitted); ``origin`` is X_0, so
    positive + negative reconstructs X - X_0. The reconstruction is exact
    in exact arithmetic (integers, dyadic rationals); on general floats it
    holds to ordinary summation rounding.
    """

    positive: np.ndarray
    negative: np.ndarray
    origin: float


@dataclass(frozen=True)
class WaldResult:
    statistic: float
    pvalue: float


@dataclass(frozen=True)
class NardlFit(ArdlFit):
    """ARDL fit over decomposed regressors plus per-variable Wald tests."""

    wald_results: dict[str, dict[str, WaldResult]] = field(default_factory=dict)
    conventions: dict[str, str] = field(default_factory=dict)


def partial_sums(series) -> PartialSumPair:
    """Split a series into cumulative positive and negative moves."""
    x = np.asarray(series, dtype=float).ravel()
    if len(x) < 2:
        raise ShortSeriesError("partial sums need at least 2 observations")
    dx = np.diff(x)
    return PartialSumPair(
        positive=np.cumsum(np.maximum(dx, 0.0)),
        negative=np.cumsum(np.minimum(dx, 0.0)),
        origin=float(x[0]),
    )


def decompose_columns(panel, regressors) -> dict[str, dict[str, np.ndarray]]:
    """Full-length (+0 origin row) partial-sum paths per regressor."""
    groups: dict[str, dict[str, np.ndarray]] = {}
    for r in regressors:
        pair = partial_sums(panel.column(r))
        groups[r] = {
            f"{r}{POS_SUFFIX}": np.concatenate([[0.0], pair.positive]),
            f"{r}{NEG_SUFFIX}": np.concatenate([[0.0], pair.negative]),
        }
    return groups


def select_lags_aic(panel, spec: ArdlSpec, caps=None, return_grid: bool = False):
    """AIC lag search with each +/- pair sharing one lag order."""
    groups = decompose_columns(panel, spec.regressors)
    return _ardl_select(panel, spec, caps=caps, groups=groups,
                        return_grid=return_grid)


def fit_nardl(panel, spec: ArdlSpec) -> NardlFit:
    """Fit the asymmetric model for ``spec`` (regressors named undecomposed)."""
    groups = decompose_columns(panel, spec.regressors)
    base = fit_ardl(panel, spec, groups=groups)
    return NardlFit(
        **{f.name: getattr(base, f.name) for f in base.__dataclass_fields__.values()},
        wald_results=wald_asymmetry(base),
        conventions={"short_run_wald": SHORT_RUN_WALD_CONVENTION},
    )


def wald_asymmetry(fit: ArdlFit) -> dict[str, dict[str, WaldResult]]:
    """Per-variable short- and long-run asymmetry F tests.

    Long run: equality of the paired level coefficients (equivalently of
    the long-run ratios). Short run: equality of the summed coefficients
    on the paired difference terms.
    """
    design = fit.design
    K = design.X.shape[1]
    out: dict[str, dict[str, WaldResult]] = {}
    for var, cols in design.group_cols.items():
        if len(cols) != 2:
            continue
        pos, neg = cols
        r_long = np.zeros(K)
        r_long[design.level_idx[pos]] = 1.0
        r_long[design.level_idx[neg]] = -1.0
        stat_l, p_l = wald_f(fit.ols_fit, r_long)

        r_short = np.zeros(K)
        for j in design.delta_idx[pos]:
            r_short[j] = 1.0
        for j in design.delta_idx[neg]:
            r_short[j] = -1.0
        stat_s, p_s = wald_f(fit.ols_fit, r_short)
        out[var] = {
            "short_run": WaldResult(float(stat_s), float(p_s)),
            "long_run": WaldResult(float(stat_l), float(p_l)),
        }
    return out
