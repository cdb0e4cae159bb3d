"""Out-of-sample density evaluation with an expanding estimation window.

The protocol re-runs the entire estimation pipeline inside every window —
pilot fit, adaptive weights, budget grid, criterion-chosen budget — using
window rows only, then predicts the grid quantiles for the first row after
the window.  Nothing after the window end (scaling bounds included) can touch
a forecast, so records are honest pseudo-out-of-sample densities.  Scores are
pinball losses per quantile, aggregated into quantile-weighted CRPS variants
that emphasize the centre or either tail.
"""

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .lasso import compute_weights, default_budget_grid, grid_search
from .panel import DesignMatrix, ScalingError, aligned_rows, fit_scaling
from .quantreg import DEFAULT_TAUS, fit_qr, pinball_loss, predict, validate_taus


@dataclass
class ForecastRecord:
    """One pseudo-out-of-sample density forecast.

    ``date`` is the target quarter the density refers to (predictor date plus
    horizon); ``quantiles`` are in grid order.  ``out_of_domain`` marks
    forecasts whose predictor left the window's scaling box, where quantile
    ordering is no longer guaranteed.
    """

    date: object
    horizon: int
    quantiles: np.ndarray
    realized: float
    out_of_domain: bool


def _window_task(args):
    (end, y, x_raw, row_dates, target_dates, spec, taus, budgets, n_budgets,
     t_min, criterion) = args
    try:
        scaling = fit_scaling(x_raw[:end], spec.regressors)
    except ScalingError as exc:
        return end, None, str(exc)
    x = np.column_stack([np.ones(end), scaling.scale(x_raw[:end])])
    design = DesignMatrix(y=y[:end], x=x, columns=list(spec.regressors),
                          row_dates=row_dates[:end], target_dates=target_dates[:end],
                          scaling=scaling, spec=spec)
    weights = compute_weights(fit_qr(design, taus))
    grid = budgets
    if grid is None:
        grid = default_budget_grid(design, weights, taus, n_points=n_budgets,
                                   t_min=t_min)
    selection = grid_search(design, weights, grid, taus=taus, criterion=criterion)
    pred = predict(selection.fit, x_raw[end])
    record = ForecastRecord(date=target_dates[end], horizon=spec.horizon,
                            quantiles=pred.values, realized=float(y[end]),
                            out_of_domain=pred.out_of_domain)
    return end, record, None


def expanding_forecast(panel, spec, taus=DEFAULT_TAUS, budgets=None,
                       n_budgets=50, t_min=1e-3, initial_size=50,
                       criterion="bic", jobs=1):
    """Walk the sample with an expanding window, forecasting one step past it.

    The first window holds the first ``initial_size`` complete design rows
    and each subsequent window adds one row.  ``budgets`` fixes a budget grid
    for every window; when ``None`` the grid is rebuilt per window from that
    window's own unpenalized fit (``n_budgets`` points down to ``t_min``).
    Windows with a degenerate design (a regressor constant over the window)
    are skipped with a warning.  Returns records in window order.
    """
    taus = validate_taus(taus)
    y, x_raw, row_dates, target_dates = aligned_rows(panel, spec)
    n = y.size
    if n < initial_size + 1:
        raise ValueError(
            f"{n} complete design rows but initial window is {initial_size}; "
            f"need at least {initial_size + 1}")
    ends = range(initial_size, n)
    tasks = [(end, y, x_raw, row_dates, target_dates, spec, taus, budgets,
              n_budgets, t_min, criterion) for end in ends]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=int(jobs)) as pool:
            results = list(pool.map(_window_task, tasks, chunksize=1))
    else:
        results = [_window_task(t) for t in tasks]
    records = []
    for end, record, problem in results:
        if record is None:
            warnings.warn(f"window ending at row {end} skipped: {problem}")
            continue
        records.append(record)
    return records


def quantile_score(predicted, realized, taus):
    """Pinball score of predicted quantiles against outcomes.

    ``predicted`` is (records x quantiles), ``realized`` a vector; returns
    the matching matrix of losses ``pinball(realized - predicted_q, tau_q)``.
    """
    predicted = np.atleast_2d(np.asarray(predicted, dtype=float))
    realized = np.asarray(realized, dtype=float).reshape(-1)
    taus = validate_taus(taus)
    if predicted.shape != (realized.size, taus.size):
        raise ValueError(
            f"predicted has shape {predicted.shape}, expected "
            f"{(realized.size, taus.size)}")
    out = np.empty_like(predicted)
    for q, tau in enumerate(taus):
        out[:, q] = pinball_loss(realized - predicted[:, q], tau)
    return out


#: weighting scheme -> weight at quantile level tau
WEIGHTINGS = {
    "uniform": lambda taus: np.full(taus.size, 1.0 / taus.size),
    "centre": lambda taus: taus * (1.0 - taus),
    "left": lambda taus: (1.0 - taus) ** 2,
    "right": lambda taus: taus ** 2,
}


def qwcrps(scores, taus, weighting="uniform"):
    """Quantile-weighted CRPS: mean over records of the weighted score sum.

    ``scores`` is the matrix from :func:`quantile_score`.  With ``uniform``
    weights this is exactly the average pinball loss across quantiles and
    records; ``centre`` emphasizes the middle of the density, ``left`` and
    ``right`` the respective tails.
    """
    if weighting not in WEIGHTINGS:
        raise ValueError(
            f"unknown weighting {weighting!r}; expected one of {sorted(WEIGHTINGS)}")
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    taus = validate_taus(taus)
    if scores.shape[1] != taus.size:
        raise ValueError(f"scores have {scores.shape[1]} columns for {taus.size} quantiles")
    w = WEIGHTINGS[weighting](taus)
    return float((scores @ w).mean())


@dataclass
class ScoreReport:
    """All four qwCRPS variants for one model and horizon."""

    name: str
    horizon: int
    n_records: int
    crps: dict

    @classmethod
    def from_records(cls, records, taus, name=""):
        taus = validate_taus(taus)
        if not records:
            raise ValueError("no forecast records to score")
        predicted = np.vstack([r.quantiles for r in records])
        realized = np.array([r.realized for r in records])
        scores = quantile_score(predicted, realized, taus)
        return cls(name=name, horizon=records[0].horizon, n_records=len(records),
                   crps={k: qwcrps(scores, taus, k) for k in
                         ("uniform", "centre", "left", "right")})
