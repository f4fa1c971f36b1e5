"""qspill command line: per-stage subcommands plus the full pipeline runner.

Standalone subcommands print to stdout or write CSV with an embedded
options hash; ``qspill run`` consumes a YAML config (every field
overridable by flag) and writes the full artifact tree.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import numpy as np
import pandas as pd
import yaml

from . import __version__
from .ardl import ArdlSpec, bounds_test, fit_ardl, select_lags_aic
from .connectedness import quantile_sweep, spillover_pipeline
from .diagnostics import diagnose
from .errors import QspillError
from .nardl import fit_nardl
from .nardl import select_lags_aic as nardl_select_lags
from .panel import DEFAULT_DATE_FORMAT, TimeSeriesPanel, describe, load_panel, log_returns
from .pipeline import (
    PipelineStageError,
    RunConfig,
    ardl_frames,
    build_dummy,
    DummySpec,
    describe_frame,
    correlation_frames,
    diagnostics_frame,
    i2_flags,
    options_hash,
    rolling_long_frame,
    run_pipeline,
    spillover_frame,
    unitroot_frame,
    write_csv,
)
from .qr import qr_fit
from .rolling import RollingConfig, rolling_spillovers

_input_options = [
    click.option("--input", "input_path", required=True,
                 type=click.Path(exists=False), help="CSV with a header row."),
    click.option("--date-column", default="date", show_default=True),
    click.option("--columns", default=None,
                 help="Comma-separated value columns (default: all but the date)."),
    click.option("--date-format", default=DEFAULT_DATE_FORMAT, show_default=True),
]


def _with_options(opts):
    def wrap(fn):
        for opt in reversed(opts):
            fn = opt(fn)
        return fn
    return wrap


def _split(text: str | None) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()] if text else []


def _taus(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in _split(text))


def _load(input_path, date_column, columns, date_format,
          as_returns: bool) -> TimeSeriesPanel:
    cols = _split(columns)
    if not cols:
        header = pd.read_csv(input_path, nrows=0).columns
        cols = [c for c in header if c != date_column]
    panel = load_panel(input_path, date_column, cols, date_format)
    return log_returns(panel) if as_returns else panel


def _emit(frame: pd.DataFrame, output: str | None, opts: dict) -> None:
    if output:
        write_csv(frame, Path(output), options_hash(opts))
        click.echo(f"wrote {output}")
    else:
        click.echo(frame.to_string())


@click.group()
@click.version_option(__version__, prog_name="qspill")
def cli():
    """Quantile spillover connectedness and uncertainty-response modeling."""


@cli.command("describe")
@_with_options(_input_options)
@click.option("--prices/--returns", "as_prices", default=True, show_default=True,
              help="Treat input as price levels (log returns computed first).")
@click.option("--output", default=None, type=click.Path())
def describe_cmd(input_path, date_column, columns, date_format, as_prices, output):
    """Descriptive statistics, normality tests, and correlations."""
    panel = _load(input_path, date_column, columns, date_format, as_prices)
    frame = describe_frame(describe(panel))
    corr, _ = correlation_frames(panel)
    opts = dict(command="describe", input=str(input_path), columns=columns,
                as_prices=as_prices)
    _emit(frame, output, opts)
    if not output:
        click.echo("\ncorrelations:")
        click.echo(corr.to_string())


@cli.command("unitroot")
@_with_options(_input_options)
@click.option("--tests", default="adf,pp,kpss", show_default=True)
@click.option("--spec", default="intercept,trend", show_default=True,
              help="Deterministic cases to report.")
@click.option("--max-lags", default=None, type=int)
@click.option("--log/--no-log", "take_log", default=False, show_default=True)
@click.option("--output", default=None, type=click.Path())
def unitroot_cmd(input_path, date_column, columns, date_format, tests, spec,
                 max_lags, take_log, output):
    """ADF/PP/KPSS battery at level and first difference."""
    panel = _load(input_path, date_column, columns, date_format, False)
    series_map = {}
    for j, name in enumerate(panel.names):
        x = panel.values[:, j]
        series_map[name] = np.log(x) if take_log else x
    frame = unitroot_frame(series_map, max_lags, tuple(_split(tests)),
                           tuple(_split(spec)))
    opts = dict(command="unitroot", input=str(input_path), tests=tests,
                spec=spec, max_lags=max_lags, log=take_log)
    _emit(frame, output, opts)
    flagged = i2_flags(frame) if "adf" in tests else []
    if flagged:
        click.echo(f"warning: possibly I(2) (ADF non-rejection at level and "
                   f"difference): {', '.join(flagged)}", err=True)


@cli.command("qr")
@_with_options(_input_options)
@click.option("--dep", required=True, help="Dependent column.")
@click.option("--regressors", default=None,
              help="Regressor columns (default: all others).")
@click.option("--tau", default=0.5, show_default=True, type=float)
def qr_cmd(input_path, date_column, columns, date_format, dep, regressors, tau):
    """Debug: single check-loss regression, coefficients as JSON."""
    panel = _load(input_path, date_column, columns, date_format, False)
    regs = _split(regressors) or [n for n in panel.names if n != dep]
    y = panel.column(dep)
    X = np.column_stack([np.ones(panel.n_obs)] +
                        [panel.column(r) for r in regs])
    fit = qr_fit(X, y, tau)
    click.echo(json.dumps({
        "tau": tau, "terms": ["intercept"] + regs,
        "coefficients": list(fit.coefficients), "objective": fit.objective,
        "iterations": fit.iterations, "converged": fit.converged,
    }, indent=2))


@cli.group("spillover")
def spillover_grp():
    """Static, sweep, and rolling connectedness tables."""


_spill_options = _input_options + [
    click.option("--prices/--returns", "as_prices", default=True, show_default=True),
    click.option("--lags", default=1, show_default=True, type=int),
    click.option("--horizon", default=12, show_default=True, type=int),
]


@spillover_grp.command("static")
@_with_options(_spill_options)
@click.option("--tau", default="0.05,0.5,0.95", show_default=True)
@click.option("--output-dir", default=None, type=click.Path())
def spillover_static_cmd(input_path, date_column, columns, date_format,
                         as_prices, lags, horizon, tau, output_dir):
    """Full-sample spillover table per quantile level."""
    panel = _load(input_path, date_column, columns, date_format, as_prices)
    opts = dict(command="spillover static", input=str(input_path), tau=tau,
                lags=lags, horizon=horizon)
    for t in _taus(tau):
        table = spillover_pipeline(panel, t, lags, horizon)
        frame = spillover_frame(table)
        if output_dir:
            write_csv(frame, Path(output_dir) / f"table_tau{t:g}.csv",
                      options_hash(opts))
        else:
            click.echo(f"tau = {t:g}  (TSI = {table.tsi:.2f}, "
                       f"stable = {table.stable})")
            click.echo(frame.to_string())
            click.echo("")
    if output_dir:
        click.echo(f"wrote tables to {output_dir}")


@spillover_grp.command("sweep")
@_with_options(_spill_options)
@click.option("--sweep", default="0.05:0.95:0.05", show_default=True,
              help="START:STOP:STEP quantile grid.")
@click.option("--output", default=None, type=click.Path())
def spillover_sweep_cmd(input_path, date_column, columns, date_format,
                        as_prices, lags, horizon, sweep, output):
    """Total spillover across a quantile grid (U-shape curve data)."""
    panel = _load(input_path, date_column, columns, date_format, as_prices)
    lo, hi, step = (float(v) for v in sweep.split(":"))
    grid = np.round(np.arange(lo, hi + step / 2, step), 10)
    result = quantile_sweep(panel, grid, lags, horizon)
    frame = pd.DataFrame(
        [{"tau": t, "tsi": tab.tsi} for t, tab in result.tables.items()]
    ).set_index("tau")
    opts = dict(command="spillover sweep", input=str(input_path), sweep=sweep,
                lags=lags, horizon=horizon)
    _emit(frame, output, opts)
    for t, msg in result.failures.items():
        click.echo(f"tau={t:g} failed: {msg}", err=True)


@spillover_grp.command("rolling")
@_with_options(_spill_options)
@click.option("--window", default=36, show_default=True, type=int)
@click.option("--tau", default="0.05,0.5,0.95", show_default=True)
@click.option("--output", default=None, type=click.Path())
def spillover_rolling_cmd(input_path, date_column, columns, date_format,
                          as_prices, lags, horizon, window, tau, output):
    """Windowed re-estimation; long-format (date, tau, metric, value) CSV."""
    panel = _load(input_path, date_column, columns, date_format, as_prices)
    taus = _taus(tau)
    cfg = RollingConfig(window=window, horizon=horizon, taus=taus, lags=lags)
    series = rolling_spillovers(panel, cfg)
    frame = rolling_long_frame(series, taus).set_index("date")
    opts = dict(command="spillover rolling", input=str(input_path), tau=tau,
                window=window, lags=lags, horizon=horizon)
    _emit(frame, output, opts)


_ardl_options = _input_options + [
    click.option("--dep", required=True),
    click.option("--regressors", required=True,
                 help="Comma-separated forcing variables."),
    click.option("--dummies", default=None,
                 help="Existing 0/1 columns entering in levels only."),
    click.option("--dummy-window", default=None,
                 help="START:END dates for a constructed dummy column."),
    click.option("--caps", default="4,4,4,4,4", show_default=True),
    click.option("--case", default="III", show_default=True,
                 type=click.Choice(["II", "III", "V"])),
    click.option("--log/--no-log", "take_log", default=True, show_default=True,
                 help="Log-transform dependent and regressors."),
    click.option("--bg-order", default=1, show_default=True, type=int),
    click.option("--output-dir", default=None, type=click.Path()),
]


def _ardl_like(asymmetric, input_path, date_column, columns, date_format, dep,
               regressors, dummies, dummy_window, caps, case, take_log,
               bg_order, output_dir):
    panel = _load(input_path, date_column, columns, date_format, False)
    regs = _split(regressors)
    dums = _split(dummies)
    names, cols = [], []
    for name in [dep] + regs:
        x = panel.column(name)
        names.append(f"ln_{name}" if take_log else name)
        cols.append(np.log(x) if take_log else x)
    for name in dums:
        names.append(name)
        cols.append(panel.column(name))
    if dummy_window:
        start, end = dummy_window.split(":")
        dums.append("dummy")
        names.append("dummy")
        cols.append(build_dummy(panel.dates, DummySpec("dummy", start, end),
                                date_format))
    work = TimeSeriesPanel(panel.dates, tuple(names), np.column_stack(cols))
    spec = ArdlSpec(names[0], tuple(names[1:1 + len(regs)]),
                    dummies=tuple(dums),
                    lag_caps=tuple(int(c) for c in _split(caps)), case=case)
    if asymmetric:
        sel = nardl_select_lags(work, spec)
        fit = fit_nardl(work, sel)
    else:
        sel = select_lags_aic(work, spec)
        fit = fit_ardl(work, sel)
    bounds = bounds_test(fit)
    opts = dict(command="nardl" if asymmetric else "ardl",
                input=str(input_path), dep=dep, regressors=regressors,
                caps=caps, case=case, log=take_log)
    frames = ardl_frames(fit)
    frames["diagnostics"] = diagnostics_frame(fit, bounds, bg_order)
    click.echo(f"selected lags: {sel.selected_lags}  aic: {fit.aic:.3f}  "
               f"nobs: {fit.nobs}")
    click.echo(f"ECT: {fit.ect_coefficient:.4f} (p={fit.ect_pvalue:.4f})  "
               f"F_PSS: {bounds.f_statistic:.3f} "
               f"[{bounds.decisions[0.05]} at 5%]")
    for name, frame in frames.items():
        if output_dir:
            write_csv(frame, Path(output_dir) / f"{name}.csv", options_hash(opts))
        else:
            click.echo(f"\n{name}:")
            click.echo(frame.to_string())
    if output_dir:
        click.echo(f"wrote tables to {output_dir}")


@cli.command("ardl")
@_with_options(_ardl_options)
def ardl_cmd(**kwargs):
    """Bounds-test regression of a series on forcing variables."""
    _ardl_like(False, **kwargs)


@cli.command("nardl")
@_with_options(_ardl_options)
def nardl_cmd(**kwargs):
    """Asymmetric variant with partial-sum decomposed regressors."""
    _ardl_like(True, **kwargs)


@cli.command("diagnose")
@_with_options(_input_options)
@click.option("--dep", required=True, help="Response column.")
@click.option("--design-columns", default=None,
              help="Regressor columns (default: all others; intercept added).")
@click.option("--bg-order", default=1, show_default=True, type=int)
def diagnose_cmd(input_path, date_column, columns, date_format, dep,
                 design_columns, bg_order):
    """Residual battery (BG, BP, RESET, CUSUM) on a least-squares problem."""
    panel = _load(input_path, date_column, columns, date_format, False)
    regs = _split(design_columns) or [n for n in panel.names if n != dep]
    y = panel.column(dep)
    X = np.column_stack([np.ones(panel.n_obs)] + [panel.column(r) for r in regs])
    report = diagnose(y, X, bg_order=bg_order)
    click.echo(json.dumps({
        "bg": {"stat": report.bg.statistic, "pvalue": report.bg.pvalue},
        "bp": {"stat": report.bp.statistic, "pvalue": report.bp.pvalue},
        "reset": {"stat": report.reset.statistic, "pvalue": report.reset.pvalue},
        "cusum": {"max_normalized_excursion": report.cusum.max_normalized_excursion,
                  "crossed": report.cusum.crossed, "pvalue": report.cusum.pvalue},
    }, indent=2))


@cli.command("run")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True), help="YAML run configuration.")
@click.option("--output-dir", default=None, type=click.Path(),
              help="Override (also via QSPILL_OUTPUT_DIR).")
@click.option("--window", default=None, type=int)
@click.option("--horizon", default=None, type=int)
@click.option("--lags", default=None, type=int)
@click.option("--taus", default=None, help="Comma-separated quantile levels.")
@click.option("--case", default=None, type=click.Choice(["II", "III", "V"]))
@click.option("--seed", default=None, type=int)
def run_cmd(config_path, output_dir, window, horizon, lags, taus, case, seed):
    """Run the full pipeline from a config file."""
    with open(config_path) as fh:
        raw = yaml.safe_load(fh)
    config = RunConfig.from_dict(raw)
    env_out = os.environ.get("QSPILL_OUTPUT_DIR")
    overrides = dict(output_dir=output_dir or env_out, window=window,
                     horizon=horizon, lags=lags, case=case, seed=seed)
    for key, val in overrides.items():
        if val is not None:
            setattr(config, key, val)
    if taus:
        config.taus = _taus(taus)
    try:
        out = run_pipeline(config)
    except PipelineStageError as exc:
        click.echo(f"[{exc.stage}] {exc}", err=True)
        sys.exit(1)
    click.echo(f"pipeline complete: {out}")


def main():
    """Entry point translating toolkit errors into clean exit messages."""
    try:
        cli(standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(1)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except QspillError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
