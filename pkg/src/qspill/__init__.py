"""qspill: quantile-VAR spillover connectedness and ARDL/NARDL modeling."""

from .ardl import ArdlFit, ArdlSpec, BoundsTestResult, bounds_test, fit_ardl, select_lags_aic
from .connectedness import (
    FevdMatrix,
    QvarModel,
    SpilloverTable,
    SweepResult,
    fit_qvar,
    gfevd,
    ma_coefficients,
    quantile_sweep,
    relative_tail_dependence,
    spillover_indices,
)
from .diagnostics import (
    CusumResult,
    DiagnosticsReport,
    TestResult,
    breusch_godfrey,
    breusch_pagan,
    cusum,
    diagnose,
    ramsey_reset,
    recursive_residuals,
)
from .nardl import NardlFit, PartialSumPair, WaldResult, fit_nardl, partial_sums, wald_asymmetry
from .panel import (
    DescriptiveStats,
    TimeSeriesPanel,
    describe,
    load_panel,
    log_returns,
    pearson_correlation,
)
from .qr import QrFit, check_loss, qr_fit
from .rolling import (
    RobustnessResult,
    RollingConfig,
    RollingSeries,
    robustness_sweep,
    rolling_spillovers,
)
from .unitroot import UnitRootResult, adf_test, kpss_test, pp_test

__version__ = "0.1.0"

__all__ = [
    "ArdlFit", "ArdlSpec", "BoundsTestResult", "bounds_test", "fit_ardl",
    "select_lags_aic", "FevdMatrix", "QvarModel", "SpilloverTable",
    "SweepResult", "fit_qvar", "gfevd", "ma_coefficients", "quantile_sweep",
    "relative_tail_dependence", "spillover_indices", "CusumResult",
    "DiagnosticsReport", "TestResult", "breusch_godfrey", "breusch_pagan",
    "cusum", "diagnose", "ramsey_reset", "recursive_residuals", "NardlFit",
    "PartialSumPair", "WaldResult", "fit_nardl", "partial_sums",
    "wald_asymmetry", "DescriptiveStats", "TimeSeriesPanel", "describe",
    "load_panel", "log_returns", "pearson_correlation", "QrFit",
    "check_loss", "qr_fit", "RobustnessResult", "RollingConfig",
    "RollingSeries", "robustness_sweep", "rolling_spillovers",
    "UnitRootResult", "adf_test", "kpss_test", "pp_test", "__version__",
]
