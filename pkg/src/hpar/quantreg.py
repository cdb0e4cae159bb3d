"""Quantile regression on a fixed grid, with and without crossing protection.

Two estimators share one linear-programming backbone:

``fit_qr``
    Independent pinball-loss regressions, one LP per quantile.  Used for
    exploratory fits and to seed the adaptive selection weights.

``fit_ncqr``
    All grid quantiles estimated in a single joint LP.  Each quantile's
    coefficient vector is parameterized as the cumulative sum of difference
    vectors (gammas); splitting the slope differences into positive and
    negative parts turns "no two quantile planes cross anywhere on the unit
    box" into one linear constraint per adjacent quantile pair: the intercept
    step must dominate the sum of negative slope-step parts.  Because design
    predictors are minimax scaled to [0, 1], the fitted quantiles are ordered
    at every sample point and at any in-domain query point.

The same joint builder optionally adds a weighted-l1 coefficient budget, which
is how the adaptive selection estimator in :mod:`hpar.lasso` is produced; the
extra machinery lives here so both callers share one variable layout.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import sparse

from .lp import LpProblem, LpStatus, solve_lp

#: the estimation grid: every 10th quantile
DEFAULT_TAUS = np.round(np.arange(1, 10) / 10.0, 1)

#: coefficients with magnitude at or below this count as excluded
EPS_SELECT = 1e-6

#: feasibility tolerance passed to the LP backend when fitting
_FIT_TOL = 1e-9


class EstimationError(RuntimeError):
    """An estimator's LP came back infeasible, unbounded, or truncated."""


def validate_taus(taus):
    """Check a quantile grid: strictly increasing, inside (0, 1)."""
    taus = np.asarray(taus, dtype=float)
    if taus.ndim != 1 or taus.size == 0:
        raise ValueError("quantile grid must be a non-empty 1-D vector")
    if np.any(taus <= 0.0) or np.any(taus >= 1.0):
        raise ValueError("quantile levels must lie strictly inside (0, 1)")
    if np.any(np.diff(taus) <= 0):
        raise ValueError("quantile levels must be strictly increasing")
    return taus


def pinball_loss(u, tau):
    """Tick loss u * (tau - 1{u < 0}), elementwise."""
    u = np.asarray(u, dtype=float)
    return np.where(u >= 0, tau * u, (tau - 1.0) * u)


class Prediction(NamedTuple):
    """Quantile predictions for one predictor vector.

    ``out_of_domain`` is set when any scaled coordinate leaves [0, 1]; the
    non-crossing guarantee only covers the unit box, so flagged predictions
    may contain crossed quantiles.
    """

    values: np.ndarray
    out_of_domain: bool


@dataclass
class QuantileFit:
    """Fitted quantile surface on scaled predictors.

    ``betas`` has one row per grid quantile (intercept first), ``gammas`` the
    adjacent-quantile differences such that row q of ``betas`` equals the
    cumulative sum of gamma rows up to q.  ``selection_mask`` marks slope
    coefficients with magnitude above :data:`EPS_SELECT`.  Coefficients live
    on the minimax-scaled predictor domain recorded in ``scaling``.
    """

    taus: np.ndarray
    betas: np.ndarray
    gammas: np.ndarray
    scaling: object
    selection_mask: np.ndarray

    @property
    def columns(self):
        return list(self.scaling.columns)

    @property
    def n_quantiles(self):
        return self.taus.size

    def fitted(self, x):
        """Fitted quantiles for design rows ``x`` (with intercept column)."""
        return np.asarray(x, dtype=float) @ self.betas.T

    def to_dict(self):
        return {
            "taus": [float(t) for t in self.taus],
            "betas": [[float(v) for v in row] for row in self.betas],
            "gammas": [[float(v) for v in row] for row in self.gammas],
            "scaling": self.scaling.to_dict(),
            "selection_mask": [[bool(v) for v in row] for row in self.selection_mask],
        }

    @classmethod
    def from_dict(cls, doc):
        from .panel import ScalingParams

        return cls(
            taus=np.array(doc["taus"], dtype=float),
            betas=np.array(doc["betas"], dtype=float),
            gammas=np.array(doc["gammas"], dtype=float),
            scaling=ScalingParams.from_dict(doc["scaling"]),
            selection_mask=np.array(doc["selection_mask"], dtype=bool),
        )


def _gammas_from_betas(betas):
    return np.vstack([betas[:1], np.diff(betas, axis=0)])


def _finish_fit(taus, betas, scaling):
    return QuantileFit(
        taus=taus,
        betas=betas,
        gammas=_gammas_from_betas(betas),
        scaling=scaling,
        selection_mask=np.abs(betas[:, 1:]) > EPS_SELECT,
    )


def fit_qr(design, taus=DEFAULT_TAUS):
    """Independent pinball regressions, one LP per grid quantile.

    No ordering constraint ties the quantiles together, so fitted planes may
    cross; use :func:`fit_ncqr` when ordered output is required.
    """
    taus = validate_taus(taus)
    t_obs, k1 = design.x.shape
    x_sp = sparse.csr_matrix(design.x)
    eye = sparse.eye(t_obs, format="csr")
    a_eq = sparse.hstack([x_sp, eye, -eye], format="csr")
    bounds = [(None, None)] * k1 + [(0.0, None)] * (2 * t_obs)
    betas = np.empty((taus.size, k1))
    for q, tau in enumerate(taus):
        c = np.concatenate([np.zeros(k1), np.full(t_obs, tau), np.full(t_obs, 1.0 - tau)])
        sol = solve_lp(LpProblem(c=c, a_eq=a_eq, b_eq=design.y, bounds=bounds),
                       tol_feas=_FIT_TOL)
        if sol.status is not LpStatus.OPTIMAL:
            raise EstimationError(
                f"quantile regression at tau={tau} failed: {sol.status.value}")
        betas[q] = sol.x[:k1]
    return _finish_fit(taus, betas, design.scaling)


def _joint_problem(design, taus, weights=None, budget=None, penalized=None):
    """Assemble the joint non-crossing LP, optionally with an l1 budget.

    Variable blocks: per-quantile betas (free), positive/negative parts of
    the slope differences for quantile pairs, residual splits, and - when a
    budget is given - one absolute-value split per penalized
    (quantile, slope) coefficient, tied to its beta by an equality row and
    priced in a single weighted budget inequality.  Slopes whose adaptive
    weight is infinite are fixed to zero through their beta bounds instead of
    entering the budget.
    """
    y, x = design.y, design.x
    t_obs, k1 = x.shape
    k = k1 - 1
    big_q = taus.size
    n_beta = big_q * k1
    n_gam = k * (big_q - 1)
    r0 = n_beta + 2 * n_gam          # residual block offset
    n_res = big_q * t_obs

    pen_pairs = []                   # (q, j) coefficients carrying budget splits
    zero_fix = []                    # (q, j) coefficients pinned to zero
    if budget is not None:
        if weights is None:
            raise ValueError("a budget requires adaptive weights")
        if penalized is None:
            penalized = np.ones(k, dtype=bool)
        w = np.asarray(weights, dtype=float)
        if w.shape != (big_q, k):
            raise ValueError(f"weights shape {w.shape}, expected {(big_q, k)}")
        for q in range(big_q):
            for j in range(1, k1):
                if not penalized[j - 1]:
                    continue
                if np.isinf(w[q, j - 1]):
                    zero_fix.append((q, j))
                else:
                    pen_pairs.append((q, j))
    s0 = r0 + 2 * n_res              # budget-split block offset
    n_pen = len(pen_pairs)
    n_var = s0 + 2 * n_pen

    c = np.zeros(n_var)
    for q, tau in enumerate(taus):
        c[r0 + q * t_obs: r0 + (q + 1) * t_obs] = tau
        c[r0 + n_res + q * t_obs: r0 + n_res + (q + 1) * t_obs] = 1.0 - tau

    rows, cols, vals, b_eq = [], [], [], []
    r = 0
    # residual rows: x_t' beta_q + u+ - u- = y_t   (vectorized per quantile)
    for q in range(big_q):
        rr = np.arange(q * t_obs, (q + 1) * t_obs)
        rows.append(np.repeat(rr, k1))
        cols.append(np.tile(np.arange(q * k1, (q + 1) * k1), t_obs))
        vals.append(x.ravel())
        rows.append(rr)
        cols.append(r0 + q * t_obs + np.arange(t_obs))
        vals.append(np.ones(t_obs))
        rows.append(rr)
        cols.append(r0 + n_res + q * t_obs + np.arange(t_obs))
        vals.append(-np.ones(t_obs))
        b_eq.extend(y.tolist())
        r += t_obs
    rows = [np.concatenate(rows)]
    cols = [np.concatenate(cols)]
    vals = [np.concatenate(vals)]

    def gp(q, j):
        return n_beta + (q - 1) * k + (j - 1)

    def gm(q, j):
        return n_beta + n_gam + (q - 1) * k + (j - 1)

    small_rows, small_cols, small_vals = [], [], []
    # slope-difference linkage: beta[q][j] - beta[q-1][j] - gp + gm = 0
    for q in range(1, big_q):
        for j in range(1, k1):
            small_rows += [r, r, r, r]
            small_cols += [q * k1 + j, (q - 1) * k1 + j, gp(q, j), gm(q, j)]
            small_vals += [1.0, -1.0, -1.0, 1.0]
            b_eq.append(0.0)
            r += 1
    # budget linkage: beta[q][j] - b+ + b- = 0
    for i, (q, j) in enumerate(pen_pairs):
        small_rows += [r, r, r]
        small_cols += [q * k1 + j, s0 + i, s0 + n_pen + i]
        small_vals += [1.0, -1.0, 1.0]
        b_eq.append(0.0)
        r += 1
    rows.append(np.array(small_rows))
    cols.append(np.array(small_cols))
    vals.append(np.array(small_vals))
    a_eq = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(r, n_var))
    b_eq = np.array(b_eq)

    # non-crossing: intercept step dominates the negative slope-step parts
    iq_rows, iq_cols, iq_vals, b_ub = [], [], [], []
    ri = 0
    for q in range(1, big_q):
        iq_rows += [ri, ri]
        iq_cols += [q * k1, (q - 1) * k1]
        iq_vals += [-1.0, 1.0]
        for j in range(1, k1):
            iq_rows.append(ri)
            iq_cols.append(gm(q, j))
            iq_vals.append(1.0)
        b_ub.append(0.0)
        ri += 1
    if budget is not None:
        for i, (q, j) in enumerate(pen_pairs):
            wv = float(weights[q, j - 1])
            iq_rows += [ri, ri]
            iq_cols += [s0 + i, s0 + n_pen + i]
            iq_vals += [wv, wv]
        b_ub.append(float(budget))
        ri += 1
    a_ub = sparse.csr_matrix((iq_vals, (iq_rows, iq_cols)), shape=(ri, n_var))
    b_ub = np.array(b_ub)

    bounds = [(None, None)] * n_beta + [(0.0, None)] * (n_var - n_beta)
    for q, j in zero_fix:
        bounds[q * k1 + j] = (0.0, 0.0)
    return LpProblem(c=c, a_eq=a_eq, b_eq=b_eq, a_ineq=a_ub, b_ineq=b_ub,
                     bounds=bounds)


def _solve_joint(design, taus, problem, label):
    sol = solve_lp(problem, tol_feas=_FIT_TOL)
    if sol.status is not LpStatus.OPTIMAL:
        raise EstimationError(f"{label} failed: {sol.status.value}")
    k1 = design.x.shape[1]
    betas = sol.x[: taus.size * k1].reshape(taus.size, k1)
    return _finish_fit(taus, betas.copy(), design.scaling)


def fit_ncqr(design, taus=DEFAULT_TAUS):
    """Jointly estimate all grid quantiles with non-crossing constraints.

    Minimizes the summed pinball loss over the whole grid subject to the
    ordering constraints; the result never crosses on the scaled unit box,
    in particular at every design row.
    """
    taus = validate_taus(taus)
    problem = _joint_problem(design, taus)
    return _solve_joint(design, taus, problem, "non-crossing quantile fit")


def predict(fit, x_raw):
    """Predict all grid quantiles for one raw predictor vector.

    The vector is scaled with the fit's stored minimax parameters; values are
    never clipped, but coordinates outside the fitting domain set the
    ``out_of_domain`` flag on the returned :class:`Prediction`.
    """
    x_raw = np.asarray(x_raw, dtype=float).reshape(-1)
    if x_raw.size != len(fit.scaling.columns):
        raise ValueError(
            f"predictor vector has {x_raw.size} entries, "
            f"fit expects {len(fit.scaling.columns)}")
    z = fit.scaling.scale(x_raw)
    flag = bool(np.any(z < -1e-9) or np.any(z > 1.0 + 1e-9))
    values = fit.betas[:, 0] + fit.betas[:, 1:] @ z
    return Prediction(values=values, out_of_domain=flag)


def total_pinball(fit, design):
    """Summed pinball loss of a fit over all grid quantiles and rows."""
    resid = design.y[:, None] - fit.fitted(design.x)
    return float(sum(pinball_loss(resid[:, q], tau).sum()
                     for q, tau in enumerate(fit.taus)))


def pinball_by_quantile(fit, design):
    """Per-quantile total pinball loss, in grid order."""
    resid = design.y[:, None] - fit.fitted(design.x)
    return np.array([pinball_loss(resid[:, q], tau).sum()
                     for q, tau in enumerate(fit.taus)])


def max_crossing_violation(fit, x=None, design=None):
    """Largest adjacent-quantile ordering violation over the given rows.

    Returns the maximum of ``fitted[q] - fitted[q+1]`` (0 when fully
    ordered); pass either a design matrix or raw rows ``x`` that already
    include the intercept column.
    """
    if x is None:
        x = design.x
    fitted = fit.fitted(x)
    if fitted.shape[1] < 2:
        return 0.0
    return float(max(0.0, np.max(fitted[:, :-1] - fitted[:, 1:])))


def unscale_coefficients(fit):
    """Coefficients re-expressed on the raw predictor scale.

    Inverts the minimax scaling: slope_j / range_j, with the intercept
    absorbing the minima shifts.  Useful for interpretation only; all fitting
    and prediction stay on the scaled domain.
    """
    rng = fit.scaling.ranges
    mins = fit.scaling.minima
    out = fit.betas.copy()
    out[:, 1:] = fit.betas[:, 1:] / rng
    out[:, 0] = fit.betas[:, 0] - (fit.betas[:, 1:] * (mins / rng)).sum(axis=1)
    return out
