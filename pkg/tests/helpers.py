"""Small shared builders for the test suite."""

import numpy as np
import pandas as pd

from hpar.panel import DesignMatrix, ScalingParams, TimeSeriesPanel, fit_scaling


def quarters(n, start="2000Q1"):
    return pd.period_range(pd.Period(start, freq="Q"), periods=n, freq="Q")


def make_design(x_raw, y, columns=None, spec=None):
    """DesignMatrix straight from raw arrays, bypassing panel alignment."""
    x_raw = np.atleast_2d(np.asarray(x_raw, dtype=float))
    y = np.asarray(y, dtype=float)
    if columns is None:
        columns = [f"x{j + 1}" for j in range(x_raw.shape[1])]
    scaling = fit_scaling(x_raw, columns)
    x = np.column_stack([np.ones(y.size), scaling.scale(x_raw)])
    dates = quarters(y.size)
    return DesignMatrix(y=y, x=x, columns=list(columns), row_dates=dates,
                        target_dates=dates + 1, scaling=scaling, spec=spec)


def intercept_only_design(y):
    """Design with only the intercept column (no regressors at all)."""
    y = np.asarray(y, dtype=float)
    scaling = ScalingParams(columns=[], minima=np.empty(0), maxima=np.empty(0))
    dates = quarters(y.size)
    return DesignMatrix(y=y, x=np.ones((y.size, 1)), columns=[],
                        row_dates=dates, target_dates=dates + 1,
                        scaling=scaling, spec=None)


def random_design(rng, t_obs, k, hetero=True):
    """Location-scale design with uniform predictors; returns the design."""
    x = rng.uniform(size=(t_obs, k))
    slopes = rng.normal(scale=2.0, size=k)
    loc = 0.5 + x @ slopes
    scale = 0.5 + 0.5 * x @ rng.uniform(size=k) if hetero else 1.0
    y = loc + scale * rng.normal(size=t_obs)
    return make_design(x, y)


def panel_from_columns(columns, start="2000Q1"):
    """TimeSeriesPanel from a {name: values} mapping."""
    n = len(next(iter(columns.values())))
    frame = pd.DataFrame(columns, index=quarters(n, start))
    return TimeSeriesPanel(frame=frame)
