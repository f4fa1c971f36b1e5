"""End-to-end pipeline: validated config in, artifact directory out.

Every stage writes CSV + JSON into its own subdirectory; each table embeds
the generating config hash (a leading ``# config_hash`` comment line in
CSV, a field in JSON). Outputs carry no timestamps, so identical configs
reproduce byte-identical artifacts.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .ardl import ArdlFit, ArdlSpec, bounds_test, fit_ardl, select_lags_aic
from .connectedness import SpilloverTable, quantile_sweep, spillover_pipeline
from .diagnostics import diagnose
from .errors import InfeasibleConfigError, QspillError
from .nardl import NardlFit, fit_nardl
from .nardl import select_lags_aic as nardl_select_lags
from .panel import (
    DEFAULT_DATE_FORMAT,
    TimeSeriesPanel,
    describe,
    load_panel,
    log_returns,
    pearson_correlation,
)
from .rolling import RollingConfig, rolling_spillovers
from .unitroot import adf_test, kpss_test, pp_test

STAGES = ("describe", "spillover_static", "spillover_rolling", "unitroot",
          "ardl", "nardl")

_FLOAT_FMT = "%.12g"


class PipelineStageError(QspillError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {type(cause).__name__}: {cause}")


@dataclass
class InputSpec:
    path: str
    date_column: str = "date"
    columns: tuple[str, ...] = ()
    date_format: str = DEFAULT_DATE_FORMAT


@dataclass
class DummySpec:
    name: str = "covid"
    start: str = "2020-01"
    end: str = "2020-12"


@dataclass
class RunConfig:
    """Declarative description of a full pipeline run."""

    prices: InputSpec
    uncertainty: InputSpec
    output_dir: str = "qspill_out"
    taus: tuple[float, ...] = (0.05, 0.5, 0.95)
    lags: int = 1
    horizon: int = 12
    window: int = 36
    sweep: tuple[float, float, float] | None = (0.05, 0.95, 0.05)
    unitroot_max_lags: int | None = None
    ardl_caps: tuple[int, ...] = (4, 4, 4, 4, 4)
    case: str = "III"
    bg_order: int = 1
    dummy: DummySpec = field(default_factory=DummySpec)
    seed: int = 0

    @staticmethod
    def from_dict(raw: dict) -> "RunConfig":
        def input_spec(d: dict) -> InputSpec:
            return InputSpec(
                path=d["path"],
                date_column=d.get("date_column", "date"),
                columns=tuple(d.get("columns", ())),
                date_format=d.get("date_format", DEFAULT_DATE_FORMAT),
            )

        kwargs: dict = {
            "prices": input_spec(raw["prices"]),
            "uncertainty": input_spec(raw["uncertainty"]),
        }
        for key in ("output_dir", "lags", "horizon", "window", "case",
                    "bg_order", "seed", "unitroot_max_lags"):
            if key in raw:
                kwargs[key] = raw[key]
        if "taus" in raw:
            kwargs["taus"] = tuple(float(t) for t in raw["taus"])
        if "sweep" in raw:
            s = raw["sweep"]
            kwargs["sweep"] = None if s is None else (
                float(s["start"]), float(s["stop"]), float(s["step"]))
        if "ardl_caps" in raw:
            kwargs["ardl_caps"] = tuple(int(c) for c in raw["ardl_caps"])
        if "dummy" in raw:
            d = raw["dummy"]
            kwargs["dummy"] = DummySpec(
                name=d.get("name", "covid"),
                start=d["start"], end=d["end"],
            )
        return RunConfig(**kwargs)

    def to_dict(self) -> dict:
        return _plain(asdict(self))


def _plain(obj):
    """Recursively convert to JSON-serializable plain Python types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.datetime64):
        return str(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def config_hash(config: RunConfig) -> str:
    """Hash of the analytical configuration (destination excluded)."""
    payload = config.to_dict()
    payload.pop("output_dir", None)
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def options_hash(options: dict) -> str:
    """Hash of a standalone command's effective options."""
    canonical = json.dumps(_plain(options), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def write_csv(frame: pd.DataFrame, path: Path, cfg_hash: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# config_hash: {cfg_hash}\n")
        frame.to_csv(fh, float_format=_FLOAT_FMT)


def write_json(obj: dict, path: Path, cfg_hash: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"config_hash": cfg_hash, **_plain(obj)}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt_dates(dates: np.ndarray) -> list[str]:
    return [str(d)[:7] for d in dates.astype("datetime64[M]").astype("datetime64[D]")]


# ---------------------------------------------------------------------------
# table shaping


def spillover_frame(table: SpilloverTable) -> pd.DataFrame:
    names = list(table.names)
    rows = {}
    for i, name in enumerate(names):
        rows[name] = list(table.matrix[i]) + [table.from_others[i]]
    rows["to_others"] = list(table.to_others) + [float(table.from_others.sum())]
    rows["inc_own"] = list(table.inc_own) + [np.nan]
    rows["net"] = list(table.net) + [np.nan]
    rows["tsi"] = [np.nan] * len(names) + [table.tsi]
    frame = pd.DataFrame.from_dict(rows, orient="index",
                                   columns=names + ["from_others"])
    frame.index.name = "series"
    return frame


def describe_frame(stats) -> pd.DataFrame:
    frame = pd.DataFrame(
        [{
            "series": s.name, "mean": s.mean, "std_dev": s.std_dev,
            "skewness": s.skewness, "kurtosis": s.kurtosis,
            "jarque_bera": s.jarque_bera_stat,
            "jarque_bera_pvalue": s.jarque_bera_pvalue, "n_obs": s.n_obs,
        } for s in stats]
    ).set_index("series")
    return frame


def correlation_frames(panel: TimeSeriesPanel) -> tuple[pd.DataFrame, pd.DataFrame]:
    corr, pvals = pearson_correlation(panel)
    names = list(panel.names)
    return (pd.DataFrame(corr, index=names, columns=names),
            pd.DataFrame(pvals, index=names, columns=names))


def unitroot_frame(series_map: dict[str, np.ndarray],
                   max_lags: int | None = None,
                   tests=("adf", "pp", "kpss"),
                   specs=("intercept", "trend")) -> pd.DataFrame:
    """Level + first-difference unit-root battery, one row per variable."""
    runners = {"adf": lambda y, s: adf_test(y, s, max_lags),
               "pp": lambda y, s: pp_test(y, s),
               "kpss": lambda y, s: kpss_test(y, s)}
    records = []
    for name, series in series_map.items():
        for transform, y in (("level", series), ("diff", np.diff(series))):
            row: dict = {"variable": name, "transform": transform}
            for test in tests:
                for spec in specs:
                    res = runners[test](y, spec)
                    row[f"{test}_{spec}"] = res.statistic
                    row[f"{test}_{spec}_sig"] = res.stars
            records.append(row)
    frame = pd.DataFrame.from_records(records).set_index(["variable", "transform"])
    return frame


def i2_flags(frame: pd.DataFrame, spec: str = "intercept") -> list[str]:
    """Variables whose ADF fails to reject at 5% in both level and diff."""
    col, sig = f"adf_{spec}", f"adf_{spec}_sig"
    flagged = []
    for var in frame.index.get_level_values(0).unique():
        stars_lvl = frame.loc[(var, "level"), sig]
        stars_dif = frame.loc[(var, "diff"), sig]
        if stars_lvl in ("", "*") and stars_dif in ("", "*"):
            flagged.append(var)
    return flagged


def ardl_frames(fit: ArdlFit) -> dict[str, pd.DataFrame]:
    def rows_frame(rows: dict) -> pd.DataFrame:
        return pd.DataFrame(
            [{"term": k, "coef": v.coef, "stderr": v.stderr, "pvalue": v.pvalue}
             for k, v in rows.items()]
        ).set_index("term")

    short = rows_frame(fit.short_run)
    short.loc["ECT(t-1)"] = [fit.ect_coefficient, np.nan, fit.ect_pvalue]
    out = {
        "short_run": short,
        "long_run": rows_frame(fit.long_run),
        "level_form": rows_frame(fit.level_terms),
    }
    if isinstance(fit, NardlFit):
        out["wald_asymmetry"] = pd.DataFrame(
            [{"variable": var,
              "short_run_stat": w["short_run"].statistic,
              "short_run_pvalue": w["short_run"].pvalue,
              "long_run_stat": w["long_run"].statistic,
              "long_run_pvalue": w["long_run"].pvalue}
             for var, w in fit.wald_results.items()]
        ).set_index("variable")
    return out


def diagnostics_frame(fit: ArdlFit, bounds, bg_order: int) -> pd.DataFrame:
    report = diagnose(fit.design.y, fit.design.X, bg_order=bg_order)
    rows = [
        {"test": "F_PSS", "statistic": bounds.f_statistic,
         "pvalue": np.nan, "note": bounds.significance},
        {"test": "BG", "statistic": report.bg.statistic,
         "pvalue": report.bg.pvalue, "note": f"order={bg_order}"},
        {"test": "BP", "statistic": report.bp.statistic,
         "pvalue": report.bp.pvalue, "note": ""},
        {"test": "RESET", "statistic": report.reset.statistic,
         "pvalue": report.reset.pvalue, "note": "powers=2,3"},
        {"test": "CUSUM", "statistic": report.cusum.max_normalized_excursion,
         "pvalue": report.cusum.pvalue,
         "note": "crossed" if report.cusum.crossed else "stable"},
    ]
    return pd.DataFrame(rows).set_index("test")


def rolling_long_frame(series, taus) -> pd.DataFrame:
    """Long-format (date, tau, metric, series, value) rows for plotting."""
    records = []
    dates = _fmt_dates(series.dates)
    for tau in taus:
        tsi = series.tsi(tau)
        net = series.net(tau)
        for i, d in enumerate(dates):
            records.append({"date": d, "tau": tau, "metric": "tsi",
                            "series": "", "value": tsi[i]})
            for j, name in enumerate(series.names):
                records.append({"date": d, "tau": tau, "metric": "net",
                                "series": name, "value": net[i, j]})
    if 0.95 in taus and 0.05 in taus:
        rtd = series.rtd(0.95, 0.05)
        for i, d in enumerate(dates):
            records.append({"date": d, "tau": np.nan, "metric": "rtd",
                            "series": "", "value": rtd[i]})
    return pd.DataFrame.from_records(records)


# ---------------------------------------------------------------------------
# pipeline


def _parse_month(value: str, fmt: str) -> np.datetime64:
    return np.datetime64(datetime.strptime(value, fmt).date(), "D")


def build_dummy(dates: np.ndarray, spec: DummySpec,
                date_format: str = DEFAULT_DATE_FORMAT) -> np.ndarray:
    """Indicator 1 exactly on the closed [start, end] interval."""
    start = _parse_month(spec.start, date_format)
    end = _parse_month(spec.end, date_format)
    if end < start:
        raise InfeasibleConfigError(f"dummy window {spec.start}..{spec.end} is empty")
    return ((dates >= start) & (dates <= end)).astype(float)


def validate_config(config: RunConfig, prices: TimeSeriesPanel,
                    indices: TimeSeriesPanel) -> None:
    returns_len = prices.n_obs - 1
    n, p = prices.n_series, config.lags
    if config.window > returns_len:
        raise InfeasibleConfigError(
            f"window {config.window} exceeds return-series length {returns_len}"
        )
    if config.window <= n * p + p + 1:
        raise InfeasibleConfigError(
            f"window {config.window} too small for N={n}, p={p}"
        )
    if config.horizon < 1:
        raise InfeasibleConfigError("horizon must be >= 1")
    for t in config.taus:
        if not 0.0 < t < 1.0:
            raise InfeasibleConfigError(f"tau={t} outside (0, 1)")
    if len(config.ardl_caps) != 1 + indices.n_series:
        raise InfeasibleConfigError(
            f"ardl_caps needs {1 + indices.n_series} entries "
            f"(dependent + {indices.n_series} indices)"
        )
    build_dummy(indices.dates, config.dummy, config.uncertainty.date_format)
    if not np.intersect1d(prices.dates[1:], indices.dates).size:
        raise InfeasibleConfigError("price and uncertainty dates do not overlap")


def run_pipeline(config: RunConfig) -> Path:
    """Execute all stages; returns the artifact directory.

    A stage failure writes a FAILED marker into the stage directory and
    raises :class:`PipelineStageError`; earlier artifacts are retained.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    h = config_hash(config)

    prices = load_panel(config.prices.path, config.prices.date_column,
                        config.prices.columns, config.prices.date_format)
    indices = load_panel(config.uncertainty.path, config.uncertainty.date_column,
                         config.uncertainty.columns, config.uncertainty.date_format)
    validate_config(config, prices, indices)
    returns = log_returns(prices)
    artifacts: dict[str, int] = {}

    def emit_csv(stage: str, name: str, frame: pd.DataFrame) -> None:
        path = out / stage / name
        write_csv(frame, path, h)
        artifacts[f"{stage}/{name}"] = path.stat().st_size

    def emit_json(stage: str, name: str, obj: dict) -> None:
        path = out / stage / name
        write_json(obj, path, h)
        artifacts[f"{stage}/{name}"] = path.stat().st_size

    def run_stage(stage, fn):
        try:
            fn()
        except Exception as exc:
            marker = out / stage
            marker.mkdir(parents=True, exist_ok=True)
            (marker / "FAILED").write_text(f"{type(exc).__name__}: {exc}\n")
            raise PipelineStageError(stage, exc) from exc

    # -- describe
    def stage_describe():
        emit_csv("describe", "returns_stats.csv", describe_frame(describe(returns)))
        corr, pv = correlation_frames(returns)
        emit_csv("describe", "correlations.csv", corr)
        emit_csv("describe", "correlation_pvalues.csv", pv)
        emit_json("describe", "summary.json", {
            "n_obs": returns.n_obs, "columns": list(returns.names),
            "dropped_rows": prices.dropped_rows,
        })

    run_stage("describe", stage_describe)

    # -- static spillovers (+ sweep curve)
    static_tables: dict[float, SpilloverTable] = {}

    def stage_static():
        for tau in config.taus:
            table = spillover_pipeline(returns, tau, config.lags, config.horizon)
            static_tables[tau] = table
            emit_csv("spillover_static", f"table_tau{tau:g}.csv",
                     spillover_frame(table))
        emit_json("spillover_static", "summary.json", {
            "tsi": {f"{tau:g}": static_tables[tau].tsi for tau in config.taus},
            "stable": {f"{tau:g}": static_tables[tau].stable for tau in config.taus},
            "lags": config.lags, "horizon": config.horizon,
        })
        if config.sweep is not None:
            lo, hi, step = config.sweep
            grid = np.round(np.arange(lo, hi + step / 2, step), 10)
            sweep = quantile_sweep(returns, grid, config.lags, config.horizon)
            rows = [{"tau": t, "tsi": tab.tsi} for t, tab in sweep.tables.items()]
            emit_csv("spillover_static", "tsi_by_tau.csv",
                     pd.DataFrame(rows).set_index("tau"))
            if sweep.failures:
                emit_json("spillover_static", "sweep_failures.json",
                          {f"{t:g}": msg for t, msg in sweep.failures.items()})

    run_stage("spillover_static", stage_static)

    # -- rolling spillovers
    roll = {}

    def stage_rolling():
        cfg = RollingConfig(window=config.window, horizon=config.horizon,
                            taus=tuple(config.taus), lags=config.lags)
        series = rolling_spillovers(returns, cfg)
        roll["series"] = series
        emit_csv("spillover_rolling", "rolling_long.csv",
                 rolling_long_frame(series, config.taus).set_index("date"))
        summary = {}
        for tau in config.taus:
            tsi = series.tsi(tau)
            ok = np.isfinite(tsi)
            summary[f"{tau:g}"] = {
                "min": float(np.nanmin(tsi)) if ok.any() else None,
                "max": float(np.nanmax(tsi)) if ok.any() else None,
                "std": float(np.nanstd(tsi)) if ok.any() else None,
                "n_windows": int(len(tsi)), "n_failed": int((~ok).sum()),
            }
        emit_json("spillover_rolling", "summary.json", {
            "window": config.window, "horizon": config.horizon, "tsi": summary,
        })

    run_stage("spillover_rolling", stage_rolling)

    # -- shared ARDL inputs: ln TSI series merged with ln indices + dummy
    series = roll["series"]
    common, ridx, iidx = np.intersect1d(series.dates, indices.dates,
                                        return_indices=True)

    def ardl_panel(tau: float) -> TimeSeriesPanel | None:
        tsi = series.tsi(tau)[ridx]
        lev = indices.values[iidx]
        dummy = build_dummy(common, config.dummy, config.uncertainty.date_format)
        keep = np.isfinite(tsi) & (tsi > 0) & np.all(lev > 0, axis=1)
        if keep.sum() < 30:
            return None
        cols = np.column_stack([np.log(tsi[keep]), np.log(lev[keep]),
                                dummy[keep]])
        names = ("ln_tsi",) + tuple(f"ln_{n}" for n in indices.names) \
            + (config.dummy.name,)
        return TimeSeriesPanel(common[keep], names, cols)

    # -- unit roots on ln TSI + ln indices
    def stage_unitroot():
        series_map: dict[str, np.ndarray] = {}
        for tau in config.taus:
            tsi = series.tsi(tau)
            tsi = tsi[np.isfinite(tsi) & (tsi > 0)]
            if len(tsi) >= 20:
                series_map[f"ln_tsi_tau{tau:g}"] = np.log(tsi)
        for j, name in enumerate(indices.names):
            series_map[f"ln_{name}"] = np.log(indices.values[:, j])
        frame = unitroot_frame(series_map, config.unitroot_max_lags)
        emit_csv("unitroot", "unitroot.csv", frame)
        emit_json("unitroot", "summary.json", {
            "possible_i2": i2_flags(frame),
            "note": "ARDL bounds testing assumes no I(2) series",
        })

    run_stage("unitroot", stage_unitroot)

    # -- ARDL / NARDL per tau
    def ardl_like_stage(stage: str, asymmetric: bool):
        def fn():
            summaries = {}
            for tau in config.taus:
                panel = ardl_panel(tau)
                if panel is None:
                    summaries[f"{tau:g}"] = {"skipped": "insufficient rows"}
                    continue
                spec = ArdlSpec("ln_tsi",
                                tuple(f"ln_{n}" for n in indices.names),
                                dummies=(config.dummy.name,),
                                lag_caps=tuple(config.ardl_caps),
                                case=config.case)
                if asymmetric:
                    sel = nardl_select_lags(panel, spec)
                    fit = fit_nardl(panel, sel)
                else:
                    sel = select_lags_aic(panel, spec)
                    fit = fit_ardl(panel, sel)
                bounds = bounds_test(fit)
                tag = f"tau{tau:g}"
                for name, frame in ardl_frames(fit).items():
                    emit_csv(stage, f"{tag}_{name}.csv", frame)
                emit_csv(stage, f"{tag}_diagnostics.csv",
                         diagnostics_frame(fit, bounds, config.bg_order))
                summaries[f"{tau:g}"] = {
                    "selected_lags": list(sel.selected_lags),
                    "aic": fit.aic, "nobs": fit.nobs,
                    "ect": fit.ect_coefficient, "ect_pvalue": fit.ect_pvalue,
                    "f_pss": bounds.f_statistic,
                    "bounds_decision_5pct": bounds.decisions[0.05],
                }
                if asymmetric:
                    summaries[f"{tau:g}"]["short_run_wald_convention"] = \
                        fit.conventions["short_run_wald"]
            emit_json(stage, "summary.json", {"models": summaries,
                                              "case": config.case})
        return fn

    run_stage("ardl", ardl_like_stage("ardl", asymmetric=False))
    run_stage("nardl", ardl_like_stage("nardl", asymmetric=True))

    manifest = {
        "package": "qspill", "version": __version__, "seed": config.seed,
        "config": config.to_dict(), "artifacts": dict(sorted(artifacts.items())),
    }
    write_json(manifest, out / "manifest.json", h)
    return out
