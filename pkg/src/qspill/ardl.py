"""ARDL estimation in first-difference (unrestricted ECM) form.

The level-form regression carries the lagged levels of the dependent and
forcing variables plus level-only dummies; long-run coefficients derive as
-alpha_k/alpha_1 with delta-method standard errors, and the explicit
error-correction refit reproduces the level-form residuals exactly (the two
parameterizations are linearly equivalent). Lag orders are chosen by AIC on
a common sample aligned at the caps. Also hosts the shared design builder
used by the asymmetric (partial-sum) variant, where a regressor "group"
carries the positive/negative pair under one lag order.

Bounds-test critical values are the Pesaran-Shin-Smith (2001) asymptotic
bounds, Tables CI(ii), CI(iii) and CI(v) (cases II, III, V).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats as sps

from ._ols import OlsFit, ols, wald_f
from .errors import InfeasibleConfigError
from .panel import TimeSeriesPanel

CASES = ("II", "III", "V")

# PSS (2001) asymptotic bound pairs (I0, I1) keyed case -> k -> level.
PSS_BOUNDS: dict[str, dict[int, dict[float, tuple[float, float]]]] = {
    "II": {
        0: {0.10: (3.80, 3.80), 0.05: (4.60, 4.60), 0.01: (6.44, 6.44)},
        1: {0.10: (3.02, 3.51), 0.05: (3.62, 4.16), 0.01: (4.94, 5.58)},
        2: {0.10: (2.63, 3.35), 0.05: (3.10, 3.87), 0.01: (4.13, 5.00)},
        3: {0.10: (2.37, 3.20), 0.05: (2.79, 3.67), 0.01: (3.65, 4.66)},
        4: {0.10: (2.20, 3.09), 0.05: (2.56, 3.49), 0.01: (3.29, 4.37)},
        5: {0.10: (2.08, 3.00), 0.05: (2.39, 3.38), 0.01: (3.06, 4.15)},
        6: {0.10: (1.99, 2.94), 0.05: (2.27, 3.28), 0.01: (2.88, 3.99)},
        7: {0.10: (1.92, 2.89), 0.05: (2.17, 3.21), 0.01: (2.73, 3.90)},
        8: {0.10: (1.85, 2.85), 0.05: (2.11, 3.15), 0.01: (2.62, 3.77)},
        9: {0.10: (1.80, 2.80), 0.05: (2.04, 3.08), 0.01: (2.50, 3.68)},
        10: {0.10: (1.76, 2.77), 0.05: (1.98, 3.04), 0.01: (2.41, 3.61)},
    },
    "III": {
        0: {0.10: (6.58, 6.58), 0.05: (8.21, 8.21), 0.01: (11.79, 11.79)},
        1: {0.10: (4.04, 4.78), 0.05: (4.94, 5.73), 0.01: (6.84, 7.84)},
        2: {0.10: (3.17, 4.14), 0.05: (3.79, 4.85), 0.01: (5.15, 6.36)},
        3: {0.10: (2.72, 3.77), 0.05: (3.23, 4.35), 0.01: (4.29, 5.61)},
        4: {0.10: (2.45, 3.52), 0.05: (2.86, 4.01), 0.01: (3.74, 5.06)},
        5: {0.10: (2.26, 3.35), 0.05: (2.62, 3.79), 0.01: (3.41, 4.68)},
        6: {0.10: (2.12, 3.23), 0.05: (2.45, 3.61), 0.01: (3.15, 4.43)},
        7: {0.10: (2.03, 3.13), 0.05: (2.32, 3.50), 0.01: (2.96, 4.26)},
        8: {0.10: (1.95, 3.06), 0.05: (2.22, 3.39), 0.01: (2.79, 4.10)},
        9: {0.10: (1.88, 2.99), 0.05: (2.14, 3.30), 0.01: (2.65, 3.97)},
        10: {0.10: (1.83, 2.94), 0.05: (2.06, 3.24), 0.01: (2.54, 3.86)},
    },
    "V": {
        0: {0.10: (9.81, 9.81), 0.05: (11.64, 11.64), 0.01: (15.73, 15.73)},
        1: {0.10: (5.59, 6.26), 0.05: (6.56, 7.30), 0.01: (8.74, 9.63)},
        2: {0.10: (4.19, 5.06), 0.05: (4.87, 5.85), 0.01: (6.34, 7.52)},
        3: {0.10: (3.47, 4.45), 0.05: (4.01, 5.07), 0.01: (5.17, 6.36)},
        4: {0.10: (3.03, 4.06), 0.05: (3.47, 4.57), 0.01: (4.40, 5.72)},
        5: {0.10: (2.75, 3.79), 0.05: (3.12, 4.25), 0.01: (3.93, 5.23)},
        6: {0.10: (2.53, 3.59), 0.05: (2.87, 4.00), 0.01: (3.60, 4.90)},
        7: {0.10: (2.38, 3.45), 0.05: (2.69, 3.83), 0.01: (3.34, 4.63)},
        8: {0.10: (2.26, 3.34), 0.05: (2.55, 3.68), 0.01: (3.15, 4.43)},
        9: {0.10: (2.16, 3.24), 0.05: (2.43, 3.56), 0.01: (2.97, 4.26)},
        10: {0.10: (2.07, 3.16), 0.05: (2.33, 3.46), 0.01: (2.84, 4.10)},
    },
}

_BOUND_LEVELS = (0.01, 0.05, 0.10)


@dataclass(frozen=True)
class ArdlSpec:
    """Model shape: dependent, forcing regressors, level-only dummies, lags.

    ``lag_caps``/``selected_lags`` align with [dependent, *regressors]; the
    dependent's order is the count of lagged differences (>= 1), each
    regressor's order the maximal lag of its contemporaneous-through-lagged
    differences (>= 0). Dummies never enter the lag grid.
    """

    dependent: str
    regressors: tuple[str, ...]
    dummies: tuple[str, ...] = ()
    lag_caps: tuple[int, ...] = ()
    selected_lags: tuple[int, ...] | None = None
    case: str = "III"

    def __post_init__(self):
        object.__setattr__(self, "regressors", tuple(self.regressors))
        object.__setattr__(self, "dummies", tuple(self.dummies))
        object.__setattr__(self, "lag_caps", tuple(int(c) for c in self.lag_caps))
        if self.selected_lags is not None:
            object.__setattr__(
                self, "selected_lags", tuple(int(v) for v in self.selected_lags)
            )
        if self.case not in CASES:
            raise InfeasibleConfigError(f"case must be one of {CASES}, got {self.case!r}")
        n_vars = 1 + len(self.regressors)
        if self.lag_caps and len(self.lag_caps) != n_vars:
            raise InfeasibleConfigError(
                f"lag_caps must have {n_vars} entries (dependent + regressors)"
            )
        if self.lag_caps and self.lag_caps[0] < 1:
            raise InfeasibleConfigError("the dependent's lag cap must be >= 1")
        if self.selected_lags is not None:
            if len(self.selected_lags) != n_vars:
                raise InfeasibleConfigError(
                    f"selected_lags must have {n_vars} entries"
                )
            if self.selected_lags[0] < 1:
                raise InfeasibleConfigError("the dependent's lag order must be >= 1")
            if self.lag_caps and any(
                s > c for s, c in zip(self.selected_lags, self.lag_caps)
            ):
                raise InfeasibleConfigError("selected_lags exceed lag_caps")


@dataclass(frozen=True)
class CoefRow:
    coef: float
    stderr: float
    pvalue: float


@dataclass(frozen=True)
class BoundsTestResult:
    f_statistic: float
    case: str
    k: int
    n_restrictions: int
    bounds: dict[float, tuple[float, float]]
    decisions: dict[float, str]  # cointegrated | inconclusive | not_cointegrated

    @property
    def significance(self) -> str:
        for lvl in _BOUND_LEVELS:
            if self.decisions[lvl] == "cointegrated":
                return f"p<{lvl:g}"
        return "p>0.1"


@dataclass(frozen=True)
class _Design:
    """Level-form regression pieces plus the column bookkeeping."""

    X: np.ndarray
    y: np.ndarray                      # response: d(dependent)
    labels: tuple[str, ...]
    t0: int                            # first level-index used as response time
    intercept_idx: int
    trend_idx: int | None
    dep_level_idx: int
    level_idx: dict[str, int]          # regressor column -> design index
    dummy_idx: dict[str, int]
    delta_dep_idx: tuple[int, ...]
    delta_idx: dict[str, tuple[int, ...]]  # regressor column -> indices, lag 0 first
    group_cols: dict[str, tuple[str, ...]]  # group/variable -> its level columns


@dataclass(frozen=True)
class ArdlFit:
    """Level-form estimates with the derived long-run and ECT views."""

    spec: ArdlSpec
    lags: tuple[int, ...]
    level_terms: dict[str, CoefRow]     # intercept, trend, y(t-1), x(t-1), dummies
    short_run: dict[str, CoefRow]       # difference terms
    long_run: dict[str, CoefRow]        # -alpha_k/alpha_1, delta-method errors
    ect_coefficient: float
    ect_pvalue: float
    aic: float
    residuals: np.ndarray
    ect_form_residuals: np.ndarray
    nobs: int
    t0: int
    ols_fit: OlsFit = field(repr=False)
    design: _Design = field(repr=False)


def _series_map(panel: TimeSeriesPanel, spec: ArdlSpec,
                groups: dict[str, dict[str, np.ndarray]] | None = None):
    """Resolve spec names to level arrays; groups may override regressors
    with multi-column decompositions keyed by the original name."""
    y = panel.column(spec.dependent)
    gmap: dict[str, list[tuple[str, np.ndarray]]] = {}
    for r in spec.regressors:
        if groups and r in groups:
            gmap[r] = list(groups[r].items())
        else:
            gmap[r] = [(r, panel.column(r))]
    dummies = [(d, panel.column(d)) for d in spec.dummies]
    return y, gmap, dummies


def _lagged_diff(x: np.ndarray, t0: int, T: int, i: int) -> np.ndarray:
    return x[t0 - i:T - i] - x[t0 - i - 1:T - i - 1]


def _build_design(y, gmap, dummies, lags, case, dep_name, t0=None) -> _Design:
    T = len(y)
    n1 = lags[0]
    lmax = max(lags) if lags else n1
    start = t0 if t0 is not None else lmax + 1
    if start < lmax + 1:
        raise InfeasibleConfigError("alignment offset smaller than the maximal lag")
    if start >= T:
        raise InfeasibleConfigError("no observations left after lag alignment")
    m = T - start

    cols: list[np.ndarray] = [np.ones(m)]
    labels: list[str] = ["intercept"]
    trend_idx = None
    if case == "V":
        cols.append(np.arange(start, T, dtype=float) + 1.0)
        labels.append("trend")
        trend_idx = 1

    dep_level_idx = len(cols)
    cols.append(y[start - 1:T - 1])
    labels.append(f"{dep_name}(t-1)")

    level_idx: dict[str, int] = {}
    group_cols: dict[str, tuple[str, ...]] = {}
    for g, (gname, gcols) in enumerate(gmap.items()):
        names = []
        for cname, x in gcols:
            level_idx[cname] = len(cols)
            cols.append(x[start - 1:T - 1])
            labels.append(f"{cname}(t-1)")
            names.append(cname)
        group_cols[gname] = tuple(names)

    dummy_idx: dict[str, int] = {}
    for dname, d in dummies:
        dummy_idx[dname] = len(cols)
        cols.append(d[start:])
        labels.append(dname)

    delta_dep = []
    for i in range(1, n1 + 1):
        delta_dep.append(len(cols))
        cols.append(_lagged_diff(y, start, T, i))
        labels.append(f"d_{dep_name}(t-{i})")

    delta_idx: dict[str, tuple[int, ...]] = {}
    for g, (gname, gcols) in enumerate(gmap.items()):
        ng = lags[1 + g]
        for cname, x in gcols:
            idxs = []
            for i in range(0, ng + 1):
                idxs.append(len(cols))
                cols.append(_lagged_diff(x, start, T, i))
                labels.append(f"d_{cname}(t)" if i == 0 else f"d_{cname}(t-{i})")
            delta_idx[cname] = tuple(idxs)

    X = np.column_stack(cols)
    resp = y[start:] - y[start - 1:T - 1]
    return _Design(
        X=X, y=resp, labels=tuple(labels), t0=start, intercept_idx=0,
        trend_idx=trend_idx, dep_level_idx=dep_level_idx, level_idx=level_idx,
        dummy_idx=dummy_idx, delta_dep_idx=tuple(delta_dep),
        delta_idx=delta_idx, group_cols=group_cols,
    )


def _aic(fit: OlsFit, n_params: int) -> float:
    return fit.nobs * np.log(fit.ssr / fit.nobs) + 2.0 * n_params


def _long_run_rows(fit: OlsFit, design: _Design) -> dict[str, CoefRow]:
    """-alpha_k/alpha_1 for every level term, delta-method standard errors."""
    a1_idx = design.dep_level_idx
    a1 = fit.params[a1_idx]
    rows: dict[str, CoefRow] = {}
    targets: list[tuple[str, int]] = [("intercept", design.intercept_idx)]
    if design.trend_idx is not None:
        targets.append(("trend", design.trend_idx))
    targets += [(design.labels[j].replace("(t-1)", ""), j)
                for name, j in design.level_idx.items()]
    targets += list(design.dummy_idx.items())
    with np.errstate(divide="ignore", invalid="ignore"):
        for name, j in targets:
            ak = fit.params[j]
            theta = -ak / a1
            grad = np.array([ak / a1**2, -1.0 / a1])
            sub = fit.cov[np.ix_([a1_idx, j], [a1_idx, j])]
            var = float(grad @ sub @ grad)
            se = np.sqrt(var) if var > 0 else np.nan
            t = theta / se if se and np.isfinite(se) and se > 0 else np.nan
            p = 2.0 * sps.t.sf(abs(t), df=fit.df_resid) if np.isfinite(t) else np.nan
            rows[name] = CoefRow(float(theta), float(se), float(p))
    return rows


def _ect_form(y, design: _Design, fit: OlsFit, dep_name: str) -> tuple[OlsFit, int]:
    """Refit with the level block collapsed into a single ECT regressor.

    The ECT carries the stochastic levels only; intercept, trend, and
    dummies stay as free regressors, making the refit an exact linear
    reparameterization of the level form.
    """
    a1 = fit.params[design.dep_level_idx]
    keep = [design.intercept_idx]
    if design.trend_idx is not None:
        keep.append(design.trend_idx)
    keep += list(design.dummy_idx.values())
    keep += list(design.delta_dep_idx)
    for idxs in design.delta_idx.values():
        keep += list(idxs)
    ect = design.X[:, design.dep_level_idx].copy()
    for name, j in design.level_idx.items():
        theta = -fit.params[j] / a1
        ect -= theta * design.X[:, j]
    X = np.column_stack([design.X[:, keep], ect])
    refit = ols(X, design.y)
    return refit, X.shape[1] - 1


def fit_ardl(panel: TimeSeriesPanel, spec: ArdlSpec,
             groups: dict[str, dict[str, np.ndarray]] | None = None) -> ArdlFit:
    """Least-squares fit of the difference-form model for ``spec``.

    ``spec.selected_lags`` must be set (run :func:`select_lags_aic` first
    or supply orders directly). ``groups`` lets a caller substitute a
    regressor with a multi-column decomposition sharing one lag order.
    """
    if spec.selected_lags is None:
        raise InfeasibleConfigError("spec has no selected_lags; run lag selection first")
    y, gmap, dummies = _series_map(panel, spec, groups)
    design = _build_design(y, gmap, dummies, spec.selected_lags, spec.case,
                           spec.dependent)
    K = design.X.shape[1]
    if design.X.shape[0] < K + 10:
        raise InfeasibleConfigError(
            f"only {design.X.shape[0]} effective observations for {K} parameters"
        )
    fit = ols(design.X, design.y)

    def row(j: int) -> CoefRow:
        return CoefRow(float(fit.params[j]), float(fit.stderr[j]), float(fit.pvalues[j]))

    level_terms = {"intercept": row(design.intercept_idx)}
    if design.trend_idx is not None:
        level_terms["trend"] = row(design.trend_idx)
    level_terms[design.labels[design.dep_level_idx]] = row(design.dep_level_idx)
    for name, j in design.level_idx.items():
        level_terms[design.labels[j]] = row(j)
    for name, j in design.dummy_idx.items():
        level_terms[name] = row(j)

    short_run = {design.labels[j]: row(j) for j in design.delta_dep_idx}
    for idxs in design.delta_idx.values():
        for j in idxs:
            short_run[design.labels[j]] = row(j)

    ect_fit, ect_col = _ect_form(y, design, fit, spec.dependent)
    return ArdlFit(
        spec=spec, lags=tuple(spec.selected_lags), level_terms=level_terms,
        short_run=short_run, long_run=_long_run_rows(fit, design),
        ect_coefficient=float(ect_fit.params[ect_col]),
        ect_pvalue=float(ect_fit.pvalues[ect_col]),
        aic=float(_aic(fit, K)), residuals=fit.residuals,
        ect_form_residuals=ect_fit.residuals, nobs=fit.nobs, t0=design.t0,
        ols_fit=fit, design=design,
    )


def select_lags_aic(panel: TimeSeriesPanel, spec: ArdlSpec,
                    caps: tuple[int, ...] | None = None,
                    groups: dict[str, dict[str, np.ndarray]] | None = None,
                    return_grid: bool = False):
    """Exhaustive AIC search over lag tuples up to the caps.

    Every candidate is scored on the common sample aligned at the caps so
    criteria are comparable; ties break toward the smaller total lag count,
    then lexicographically. Returns the spec with ``selected_lags`` set.
    """
    caps = tuple(int(c) for c in (caps if caps is not None else spec.lag_caps))
    if not caps:
        raise InfeasibleConfigError("no lag caps supplied")
    spec = replace(spec, lag_caps=caps)
    y, gmap, dummies = _series_map(panel, spec, groups)
    lmax = max(caps)
    t0 = lmax + 1

    # feasibility at the largest candidate
    width = sum(len(cols) for cols in gmap.values())
    kmax = (1 + (1 if spec.case == "V" else 0) + 1 + width + len(dummies)
            + caps[0] + sum((caps[1 + g] + 1) * len(gmap[name])
                            for g, name in enumerate(gmap)))
    if len(y) - t0 < kmax + 10:
        raise InfeasibleConfigError(
            f"caps {caps} infeasible: {len(y) - t0} common-sample rows "
            f"for up to {kmax} parameters"
        )

    ranges = [range(1, caps[0] + 1)] + [range(0, c + 1) for c in caps[1:]]
    best: tuple | None = None
    grid: dict[tuple[int, ...], float] = {}
    for lags in itertools.product(*ranges):
        design = _build_design(y, gmap, dummies, lags, spec.case,
                               spec.dependent, t0=t0)
        fit = ols(design.X, design.y)
        aic = float(_aic(fit, design.X.shape[1]))
        grid[lags] = aic
        key = (aic, sum(lags), lags)
        if best is None or key < best:
            best = key
    selected = replace(spec, selected_lags=best[2])
    return (selected, grid) if return_grid else selected


def bounds_test(fit: ArdlFit, k: int | None = None) -> BoundsTestResult:
    """PSS bounds F-test on the joint nullity of every level term.

    The restriction covers the lagged dependent and regressor levels plus
    any dummies, and under case II also the (restricted) intercept; cases
    III and V leave the deterministic terms unrestricted. ``k`` defaults to
    the number of forcing variables (decomposition pairs count once).
    """
    design = fit.design
    case = fit.spec.case
    restrict = [design.dep_level_idx]
    restrict += list(design.level_idx.values())
    restrict += list(design.dummy_idx.values())
    if case == "II":
        restrict.append(design.intercept_idx)
    q = len(restrict)
    R = np.zeros((q, design.X.shape[1]))
    for i, j in enumerate(restrict):
        R[i, j] = 1.0
    stat, _ = wald_f(fit.ols_fit, R)
    if k is None:
        k = len(design.group_cols)
    table = PSS_BOUNDS[case]
    if k not in table:
        raise InfeasibleConfigError(f"no tabulated bounds for k={k} (case {case})")
    bounds = dict(table[k])
    decisions = {}
    for lvl in _BOUND_LEVELS:
        lo, hi = bounds[lvl]
        if stat > hi:
            decisions[lvl] = "cointegrated"
        elif stat < lo:
            decisions[lvl] = "not_cointegrated"
        else:
            decisions[lvl] = "inconclusive"
    return BoundsTestResult(f_statistic=float(stat), case=case, k=k,
                            n_restrictions=q, bounds=bounds, decisions=decisions)
