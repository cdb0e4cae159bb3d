"""House-price-at-risk modeling toolkit.

Conditional density estimation for housing (or any macro) growth built from
jointly-estimated non-crossing quantile regressions with adaptive-LASSO
coefficient selection, expanding-window density-forecast evaluation under
quantile-weighted CRPS, tail-risk summaries (uncertainty, skewness, expected
shortfall and longrise), and VAR-based spillover indices connecting the tail
measures to a stress indicator.
"""

from .forecast import (ForecastRecord, ScoreReport, expanding_forecast,
                       quantile_score, qwcrps)
from .lasso import (AdaptiveWeights, DegenerateFitWarning, SelectionResult,
                    compute_weights, default_budget_grid, fit_alasso,
                    grid_search, information_criterion)
from .lp import (LpConstructionError, LpProblem, LpSolution, LpSolverError,
                 LpStatus, solve_lp)
from .panel import (DateOrderError, DesignMatrix, ModelSpec, PanelFormatError,
                    ScalingError, ScalingParams, TimeSeriesPanel, build_design,
                    format_quarter, load_panel, parse_quarter, save_panel,
                    transform)
from .quantreg import (DEFAULT_TAUS, EstimationError, Prediction, QuantileFit,
                       fit_ncqr, fit_qr, max_crossing_violation, pinball_loss,
                       predict, total_pinball, unscale_coefficients)
from .risk import (QuantileCurve, RiskSeries, decompose, expected_longrise,
                   expected_shortfall, quantile_function, risk_series,
                   skewness, uncertainty)
from .spillover import (ConnectednessReport, FevdTable, RollingSpillover,
                        VarModel, cholesky_fevd, connectedness, fit_var,
                        girf_fevd, impulse_response, ma_coefficients,
                        rolling_spillover, select_lag, spectral_radius)
from .synth import (location_scale_panel, regime_switch_var, sparse_panel)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveWeights", "ConnectednessReport", "DEFAULT_TAUS",
    "DateOrderError", "DegenerateFitWarning", "DesignMatrix",
    "EstimationError", "FevdTable", "ForecastRecord", "LpConstructionError",
    "LpProblem", "LpSolution", "LpSolverError", "LpStatus", "ModelSpec",
    "PanelFormatError", "Prediction", "QuantileCurve", "QuantileFit",
    "RiskSeries", "RollingSpillover", "ScalingError", "ScalingParams",
    "ScoreReport", "SelectionResult", "TimeSeriesPanel", "VarModel",
    "build_design", "cholesky_fevd", "compute_weights", "connectedness",
    "decompose", "default_budget_grid", "expanding_forecast",
    "expected_longrise", "expected_shortfall", "fit_alasso", "fit_ncqr",
    "fit_qr", "fit_var", "format_quarter", "girf_fevd", "grid_search",
    "impulse_response", "information_criterion", "load_panel",
    "location_scale_panel", "ma_coefficients", "max_crossing_violation",
    "parse_quarter", "pinball_loss", "predict", "quantile_function",
    "quantile_score", "qwcrps", "regime_switch_var", "risk_series",
    "rolling_spillover", "save_panel", "select_lag", "skewness", "solve_lp",
    "sparse_panel", "spectral_radius", "total_pinball", "transform",
    "uncertainty", "unscale_coefficients",
]
