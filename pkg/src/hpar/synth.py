"""Seeded synthetic data generators with documented closed-form truth.

Three families cover the package's surface: a location-scale(-skew) design
whose conditional quantiles are exactly linear in the predictors (so quantile
fits and density forecasts can be checked against the truth), a sparse design
where only a known subset of regressors matters (for selection tests), and a
two-regime VAR whose cross-effects switch on halfway through the sample (for
rolling spillover tests).  Everything is driven by ``numpy``'s seeded
generator, so a (kind, seed) pair pins the data exactly.
"""

from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import stats

from .panel import TimeSeriesPanel


def _quarters(n, start="2000Q1"):
    first = pd.Period(start, freq="Q")
    return pd.period_range(first, periods=n, freq="Q")


@dataclass
class LocationScaleTruth:
    """Parameters of the location-scale DGP and its exact quantiles.

    The response is ``y = a + b'x + (c + d'x) * eps`` with ``eps`` standard
    normal (or skew-normal for nonzero ``shape``), so the conditional
    tau-quantile is ``a + b'x + (c + d'x) * F^{-1}(tau)`` -- linear in x at
    every tau.  ``d >= 0`` and ``c > 0`` keep the scale positive on the unit
    box.  In the generated panels the conditioning row ``x`` is the
    *previous* period's predictors, so the truth for the response dated t is
    ``quantile(x_rows[t - 1], tau)``.
    """

    columns: list
    intercept: float
    slopes: np.ndarray
    scale_intercept: float
    scale_slopes: np.ndarray
    shape: float = 0.0

    def ppf(self, tau):
        if self.shape == 0.0:
            return stats.norm.ppf(tau)
        return stats.skewnorm.ppf(tau, self.shape)

    def quantile(self, x_row, tau):
        """Exact conditional quantile at predictor row ``x_row``."""
        x_row = np.asarray(x_row, dtype=float)
        loc = self.intercept + self.slopes @ x_row
        scale = self.scale_intercept + self.scale_slopes @ x_row
        return loc + scale * self.ppf(tau)

    def quantile_matrix(self, x_rows, taus):
        x_rows = np.atleast_2d(np.asarray(x_rows, dtype=float))
        return np.column_stack([
            [self.quantile(row, tau) for tau in np.asarray(taus, dtype=float)]
            for row in x_rows]).T

    def to_dict(self):
        return {
            "columns": list(self.columns),
            "intercept": float(self.intercept),
            "slopes": [float(v) for v in self.slopes],
            "scale_intercept": float(self.scale_intercept),
            "scale_slopes": [float(v) for v in self.scale_slopes],
            "shape": float(self.shape),
        }


def location_scale_panel(n_periods, seed, n_regressors=2, shape=0.0,
                         include_stress=True, start="2000Q1"):
    """Quarterly panel from the location-scale DGP.

    Predictors ``x1..xK`` are iid uniform on (0, 1); with ``include_stress``
    an extra ``stress`` column follows a logistic-squashed AR(1), standing in
    for a persistent stress index that widens the conditional distribution.
    The response dated t is driven by the predictor row dated t - 1, matching
    the one-step-ahead design used throughout, so row t of the panel pairs
    the realised response with the predictor levels that will drive t + 1.
    Returns ``(panel, truth)`` where ``truth`` also records which column is
    which.
    """
    rng = np.random.default_rng(seed)
    k = int(n_regressors)
    cols = [f"x{i + 1}" for i in range(k)]
    x = rng.uniform(size=(n_periods, k))
    slopes = np.full(k, 2.5)
    scale_slopes = np.full(k, 0.3)
    if include_stress:
        z = np.empty(n_periods)
        z[0] = rng.normal()
        for t in range(1, n_periods):
            z[t] = 0.85 * z[t - 1] + 0.5 * rng.normal()
        stress = 1.0 / (1.0 + np.exp(-z))
        x = np.column_stack([x, stress])
        cols = cols + ["stress"]
        slopes = np.append(slopes, 1.5)
        scale_slopes = np.append(scale_slopes, 0.6)
    truth = LocationScaleTruth(columns=cols, intercept=1.0, slopes=slopes,
                               scale_intercept=0.5, scale_slopes=scale_slopes,
                               shape=float(shape))
    if shape == 0.0:
        eps = rng.normal(size=n_periods)
    else:
        eps = stats.skewnorm.rvs(shape, size=n_periods, random_state=rng)
    loc = truth.intercept + x @ truth.slopes
    scale = truth.scale_intercept + x @ truth.scale_slopes
    y = np.empty(n_periods)
    # First row has no predecessor; seed it from its own predictors (it only
    # ever acts as the lagged response for the second period).
    y[0] = loc[0] + scale[0] * eps[0]
    y[1:] = loc[:-1] + scale[:-1] * eps[1:]
    frame = pd.DataFrame({"y": y, **{c: x[:, i] for i, c in enumerate(cols)}},
                         index=_quarters(n_periods, start))
    return TimeSeriesPanel(frame=frame), truth


@dataclass
class SparseTruth:
    """Which regressors actually enter the sparse DGP, and how."""

    columns: list
    active: list
    intercept: float
    slopes: np.ndarray
    noise: float

    def to_dict(self):
        return {
            "columns": list(self.columns),
            "active": list(self.active),
            "intercept": float(self.intercept),
            "slopes": [float(v) for v in self.slopes],
            "noise": float(self.noise),
        }


def sparse_panel(n_periods, seed, n_regressors=6, n_active=2, coef=2.0,
                 noise=0.5, start="2000Q1"):
    """Panel where only the first ``n_active`` regressors drive the response.

    Active slopes alternate in sign (+coef, -coef, ...); the rest are exactly
    zero.  Homoskedastic Gaussian noise, so every conditional quantile shares
    the same slopes -- the inactive ones should be excluded at every quantile
    by a working selector.  As in :func:`location_scale_panel` the response
    dated t is driven by the predictor row dated t - 1.
    """
    rng = np.random.default_rng(seed)
    k = int(n_regressors)
    if not 1 <= n_active <= k:
        raise ValueError("need 1 <= n_active <= n_regressors")
    cols = [f"x{i + 1}" for i in range(k)]
    slopes = np.zeros(k)
    for i in range(n_active):
        slopes[i] = coef if i % 2 == 0 else -coef
    x = rng.uniform(size=(n_periods, k))
    signal = 0.5 + x @ slopes
    eps = rng.normal(size=n_periods)
    y = np.empty(n_periods)
    y[0] = signal[0] + noise * eps[0]
    y[1:] = signal[:-1] + noise * eps[1:]
    frame = pd.DataFrame({"y": y, **{c: x[:, i] for i, c in enumerate(cols)}},
                         index=_quarters(n_periods, start))
    truth = SparseTruth(columns=cols, active=cols[:n_active], intercept=0.5,
                        slopes=slopes, noise=float(noise))
    return TimeSeriesPanel(frame=frame), truth


@dataclass
class RegimeSwitchTruth:
    """Two-regime VAR(1) parameters and the switch location."""

    columns: list
    switch_index: int
    calm_matrix: np.ndarray
    coupled_matrix: np.ndarray

    def to_dict(self):
        return {
            "columns": list(self.columns),
            "switch_index": int(self.switch_index),
            "calm_matrix": [[float(v) for v in row] for row in self.calm_matrix],
            "coupled_matrix": [[float(v) for v in row] for row in self.coupled_matrix],
        }


def regime_switch_var(n_periods, seed, n_series=2, diag=0.2, cross=0.45,
                      switch=None, start="1990Q1"):
    """VAR(1) panel whose cross-effects turn on at the switch point.

    Before ``switch`` (default: halfway) the transition matrix is diagonal --
    no spillovers beyond contemporaneous noise; from the switch onward all
    off-diagonal entries equal ``cross``, so shocks propagate across series
    and any connectedness measure should rise.  Unit innovation covariance.
    """
    rng = np.random.default_rng(seed)
    n = int(n_series)
    if switch is None:
        switch = n_periods // 2
    switch = int(switch)
    if not 0 < switch < n_periods:
        raise ValueError("switch must fall strictly inside the sample")
    calm = np.eye(n) * diag
    coupled = np.full((n, n), cross)
    np.fill_diagonal(coupled, diag)
    for label, mat in (("calm", calm), ("coupled", coupled)):
        radius = np.abs(np.linalg.eigvals(mat)).max()
        if radius >= 0.999:
            raise ValueError(
                f"{label} regime is unstable (spectral radius {radius:.3f}); "
                f"reduce diag/cross")
    burn = 50
    y = np.zeros((burn + n_periods, n))
    for t in range(1, burn + n_periods):
        mat = calm if (t - burn) < switch else coupled
        y[t] = mat @ y[t - 1] + rng.normal(size=n)
    y = y[burn:]
    cols = [f"v{i + 1}" for i in range(n)]
    frame = pd.DataFrame({c: y[:, i] for i, c in enumerate(cols)},
                         index=_quarters(n_periods, start))
    truth = RegimeSwitchTruth(columns=cols, switch_index=switch,
                              calm_matrix=calm, coupled_matrix=coupled)
    return TimeSeriesPanel(frame=frame), truth
