"""VAR-based spillover and connectedness measures between risk series.

A small vector autoregression is estimated equation by equation; its moving-
average representation feeds a generalized (ordering-invariant) forecast
error variance decomposition, whose row-normalized table underlies the
connectedness measures: a total index (the off-diagonal share), directional
to/from series per variable, and an antisymmetric pairwise net table.  A
rolling variant re-estimates everything on a short trailing window to trace
the indices through time.  Generalized impulse responses use the same
one-standard-deviation shock convention as the decomposition.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .quantreg import EstimationError


@dataclass
class VarModel:
    """Estimated VAR(p): one coefficient matrix per lag plus an intercept.

    ``coefs[l][i, j]`` is the effect of variable j at lag l+1 on variable i;
    ``sigma`` is the residual covariance with a small-sample divisor
    (observations minus parameters per equation).
    """

    names: list
    p: int
    const: np.ndarray
    coefs: np.ndarray
    sigma: np.ndarray
    residuals: np.ndarray
    nobs: int

    @property
    def n_series(self):
        return len(self.names)

    def index_of(self, name):
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no variable {name!r} in VAR ({self.names})") from None


def fit_var(data, names=None, p=1):
    """Least-squares VAR(p) with intercept on a (T x N) data matrix.

    ``p = 0`` degenerates to the intercept-only model whose ``sigma`` is the
    sample covariance.  Raises :class:`EstimationError` on rank-deficient
    regressors or samples too short for the parameter count.
    """
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if data.ndim != 2:
        raise ValueError("data must be a (T, N) matrix")
    t_total, n = data.shape
    if names is None:
        names = [f"y{i + 1}" for i in range(n)]
    names = list(names)
    if len(names) != n:
        raise ValueError(f"{len(names)} names for {n} series")
    if not np.all(np.isfinite(data)):
        raise ValueError("data contains NaN or Inf")
    p = int(p)
    if p < 0:
        raise ValueError("lag order must be non-negative")
    t_eff = t_total - p
    n_params = n * p + 1
    if t_eff - n_params < 1:
        raise EstimationError(
            f"{t_total} observations are too few for a {n}-variable VAR({p}); "
            f"need at least {p + n_params + 1}")
    outcome = data[p:]
    blocks = [np.ones((t_eff, 1))]
    for lag in range(1, p + 1):
        blocks.append(data[p - lag: t_total - lag])
    z = np.hstack(blocks)
    if np.linalg.matrix_rank(z) < n_params:
        raise EstimationError(
            "rank-deficient VAR regressor matrix (collinear lags or constant series)")
    b, *_ = np.linalg.lstsq(z, outcome, rcond=None)
    resid = outcome - z @ b
    sigma = resid.T @ resid / (t_eff - n_params)
    coefs = np.empty((p, n, n))
    for lag in range(p):
        coefs[lag] = b[1 + lag * n: 1 + (lag + 1) * n].T
    return VarModel(names=names, p=p, const=b[0].copy(), coefs=coefs,
                    sigma=sigma, residuals=resid, nobs=t_eff)


def spectral_radius(model):
    """Largest companion-matrix eigenvalue modulus (< 1 means stable)."""
    if model.p == 0:
        return 0.0
    n, p = model.n_series, model.p
    comp = np.zeros((n * p, n * p))
    comp[:n] = np.hstack([model.coefs[lag] for lag in range(p)])
    if p > 1:
        comp[n:, :-n] = np.eye(n * (p - 1))
    return float(np.abs(np.linalg.eigvals(comp)).max())


def select_lag(data, names=None, p_max=4, criterion="bic"):
    """Pick the VAR lag order in 1..p_max by information criterion.

    All candidates are scored on the common sample that drops ``p_max``
    initial rows, so their likelihoods are comparable; ties go to the
    smaller order.
    """
    if criterion not in ("bic", "aic"):
        raise ValueError(f"criterion must be 'bic' or 'aic', got {criterion!r}")
    data = np.asarray(data, dtype=float)
    best_p, best_score = None, np.inf
    for p in range(1, int(p_max) + 1):
        model = fit_var(data[p_max - p:], names=names, p=p)
        n = model.n_series
        t_eff = model.nobs
        sigma_ml = model.residuals.T @ model.residuals / t_eff
        sign, logdet = np.linalg.slogdet(sigma_ml)
        if sign <= 0:
            continue
        k = n * (n * p + 1)
        factor = np.log(t_eff) if criterion == "bic" else 2.0
        score = logdet + factor * k / t_eff
        if score < best_score - 1e-12:
            best_p, best_score = p, score
    if best_p is None:
        raise EstimationError("lag selection failed: no candidate had a valid covariance")
    return best_p


def ma_coefficients(model, horizon):
    """Moving-average matrices Phi_0..Phi_horizon by recursion (Phi_0 = I)."""
    horizon = int(horizon)
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    n = model.n_series
    phis = np.zeros((horizon + 1, n, n))
    phis[0] = np.eye(n)
    for h in range(1, horizon + 1):
        acc = np.zeros((n, n))
        for lag in range(1, min(h, model.p) + 1):
            acc += model.coefs[lag - 1] @ phis[h - lag]
        phis[h] = acc
    return phis


@dataclass
class FevdTable:
    """Forecast error variance decomposition at one horizon.

    ``normalized`` rows sum to one: entry (i, j) is the share of variable i's
    H-step forecast error variance attributed to shocks in variable j.
    """

    names: list
    horizon: int
    raw: np.ndarray
    normalized: np.ndarray
    method: str
    sigma_scaled: bool = True


def _check_sigma(sigma):
    if np.any(np.diag(sigma) <= 0):
        raise EstimationError("residual covariance has non-positive variances")


def girf_fevd(model, horizon=12, include_sigma_jj_scaling=True):
    """Generalized FEVD over the H-step forecast error (impact included).

    The generalized decomposition shocks each variable by one standard
    deviation without orthogonalization, so it is invariant to variable
    ordering; raw rows need not sum to one and are therefore row-normalized.
    ``include_sigma_jj_scaling=False`` drops the 1/sigma_jj factor from the
    numerator (a non-standard variant that rescales columns; the normalized
    table coincides with the standard one when residual variances are equal).
    """
    horizon = int(horizon)
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    _check_sigma(model.sigma)
    phis = ma_coefficients(model, horizon - 1)
    sigma = model.sigma
    n = model.n_series
    num = np.zeros((n, n))
    denom = np.zeros(n)
    for h in range(horizon):
        ps = phis[h] @ sigma
        num += ps ** 2
        denom += np.einsum("ij,ij->i", ps, phis[h])
    if include_sigma_jj_scaling:
        num = num / np.diag(sigma)[None, :]
    raw = num / denom[:, None]
    normalized = raw / raw.sum(axis=1, keepdims=True)
    return FevdTable(names=list(model.names), horizon=horizon, raw=raw,
                     normalized=normalized, method="generalized",
                     sigma_scaled=include_sigma_jj_scaling)


def cholesky_fevd(model, horizon=12):
    """Orthogonalized FEVD in the model's variable ordering.

    Rows of the raw table sum to one by construction; kept as a cross-check
    against the generalized table, with which it coincides when the residual
    covariance is diagonal.
    """
    horizon = int(horizon)
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    _check_sigma(model.sigma)
    try:
        chol = np.linalg.cholesky(model.sigma)
    except np.linalg.LinAlgError as exc:
        raise EstimationError("residual covariance is not positive definite") from exc
    phis = ma_coefficients(model, horizon - 1)
    n = model.n_series
    num = np.zeros((n, n))
    denom = np.zeros(n)
    for h in range(horizon):
        pc = phis[h] @ chol
        num += pc ** 2
        denom += np.einsum("ij,ij->i", phis[h] @ model.sigma, phis[h])
    raw = num / denom[:, None]
    normalized = raw / raw.sum(axis=1, keepdims=True)
    return FevdTable(names=list(model.names), horizon=horizon, raw=raw,
                     normalized=normalized, method="cholesky")


@dataclass
class ConnectednessReport:
    """Connectedness measures on the percentage scale.

    ``table`` is 100 x the normalized FEVD.  ``received[i]`` sums variable
    i's off-diagonal row (spillover to i from all others), ``transmitted[j]``
    the off-diagonal column.  ``pairwise[i, j] = table[i, j] - table[j, i]``
    is antisymmetric: positive means j drives i on net.
    """

    names: list
    horizon: int
    table: np.ndarray
    total: float
    received: np.ndarray
    transmitted: np.ndarray
    net: np.ndarray
    pairwise: np.ndarray

    def index_of(self, name):
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no variable {name!r} in report ({self.names})") from None

    def net_pairwise(self, source, target):
        """Net directional spillover from ``source`` to ``target``.

        Positive values mean ``source`` drives ``target`` more than the
        reverse; equals ``-net_pairwise(target, source)`` exactly.
        """
        i = self.index_of(source)
        j = self.index_of(target)
        return float(self.pairwise[j, i])


def connectedness(fevd):
    """Summarize a :class:`FevdTable` into a :class:`ConnectednessReport`."""
    tbl = 100.0 * fevd.normalized
    n = tbl.shape[0]
    diag = np.diag(tbl)
    received = tbl.sum(axis=1) - diag
    transmitted = tbl.sum(axis=0) - diag
    total = float(transmitted.sum() / n)
    return ConnectednessReport(names=list(fevd.names), horizon=fevd.horizon,
                               table=tbl, total=total, received=received,
                               transmitted=transmitted,
                               net=transmitted - received,
                               pairwise=tbl - tbl.T)


@dataclass
class RollingSpillover:
    """Connectedness re-estimated on a trailing window per end date.

    ``reports`` holds ``None`` where a window could not be estimated (the
    date still appears, keeping the series aligned); ``total_series`` exposes
    the headline index with NaN at those gaps.
    """

    end_dates: list
    reports: list
    window: int

    @property
    def total_series(self):
        return np.array([np.nan if r is None else r.total for r in self.reports])

    def __len__(self):
        return len(self.reports)


def rolling_spillover(data, names=None, window=10, p=1, horizon=12,
                      dates=None, include_sigma_jj_scaling=True):
    """Re-estimate VAR + FEVD + connectedness on each trailing window.

    Window ``t`` covers rows ``t - window + 1 .. t``; the report is indexed
    by the window's end date (row index when ``dates`` is omitted).  Windows
    where estimation fails -- rank deficiency on a short stretch, exploding
    covariance -- become gaps rather than errors.
    """
    data = np.atleast_2d(np.asarray(data, dtype=float))
    t_total = data.shape[0]
    window = int(window)
    if window < 2:
        raise ValueError("window must cover at least two observations")
    if t_total < window:
        raise ValueError(f"{t_total} rows are fewer than the window ({window})")
    if dates is None:
        dates = list(range(t_total))
    dates = list(dates)
    if len(dates) != t_total:
        raise ValueError(f"{len(dates)} dates for {t_total} rows")
    end_dates, reports, n_failed = [], [], 0
    for end in range(window - 1, t_total):
        chunk = data[end - window + 1: end + 1]
        try:
            model = fit_var(chunk, names=names, p=p)
            rep = connectedness(girf_fevd(model, horizon,
                                          include_sigma_jj_scaling))
        except (EstimationError, np.linalg.LinAlgError):
            rep = None
            n_failed += 1
        end_dates.append(dates[end])
        reports.append(rep)
    if n_failed:
        warnings.warn(f"{n_failed} of {len(reports)} rolling windows failed "
                      f"to estimate and were left as gaps")
    return RollingSpillover(end_dates=end_dates, reports=reports, window=window)


def impulse_response(model, shock, horizon=12):
    """Generalized impulse responses to a one-standard-deviation shock.

    Returns a (horizon + 1, N) array whose row h is ``Phi_h sigma e_j /
    sqrt(sigma_jj)``; on impact the shocked variable moves by its own
    residual standard deviation.  ``shock`` is a variable name or index.
    """
    _check_sigma(model.sigma)
    j = model.index_of(shock)
    phis = ma_coefficients(model, horizon)
    scale = np.sqrt(model.sigma[j, j])
    return np.array([phi @ model.sigma[:, j] / scale for phi in phis])
