"""Adaptive-LASSO coefficient selection for the joint quantile estimator.

Selection works by adding one global budget to the joint non-crossing LP: the
weighted l1 norm of all penalized slope coefficients, summed across every grid
quantile, may not exceed ``t``.  Weights are reciprocal magnitudes of an
unpenalized per-quantile fit, so precisely-estimated large coefficients are
cheap to keep while noise coefficients are expensive; a coefficient whose
pilot estimate is numerically zero gets an infinite weight and is pinned to
zero outright.  The budget is tuned by grid search on an information
criterion that combines log pinball losses with a count of surviving
coefficients.
"""

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .quantreg import (fit_ncqr, pinball_by_quantile, validate_taus,
                       _joint_problem, _solve_joint)


class DegenerateFitWarning(UserWarning):
    """A quantile attained exactly zero pinball loss (perfect in-sample fit)."""


@dataclass
class AdaptiveWeights:
    """Reciprocal-magnitude penalty weights, one per (quantile, slope).

    ``values[q, j] = 1 / |beta_qj|`` from a pilot fit; entries are ``inf``
    where the pilot magnitude is below ``eps``, which the budgeted fit turns
    into a hard zero restriction.
    """

    taus: np.ndarray
    columns: list
    values: np.ndarray
    eps: float = 1e-6

    @property
    def n_infinite(self):
        return int(np.isinf(self.values).sum())


def compute_weights(pilot_fit, eps=1e-6):
    """Build :class:`AdaptiveWeights` from an unpenalized fit (slopes only)."""
    mags = np.abs(pilot_fit.betas[:, 1:])
    with np.errstate(divide="ignore"):
        values = np.where(mags < eps, np.inf, 1.0 / np.where(mags < eps, 1.0, mags))
    return AdaptiveWeights(taus=pilot_fit.taus.copy(),
                           columns=list(pilot_fit.columns),
                           values=values, eps=eps)


def _penalized_mask(design, unpenalized):
    if unpenalized is None:
        unpenalized = design.spec.unpenalized if design.spec is not None else ()
    unknown = set(unpenalized) - set(design.columns)
    if unknown:
        raise ValueError(f"unpenalized columns not in design: {sorted(unknown)}")
    return np.array([c not in set(unpenalized) for c in design.columns]), unpenalized


def fit_alasso(design, weights, budget, taus=None, unpenalized=None):
    """Joint non-crossing fit under a weighted-l1 budget of size ``budget``.

    ``taus`` defaults to the grid the weights were computed on.  Columns in
    ``unpenalized`` (default: the design's model spec) bypass the budget
    entirely but stay inside the non-crossing parameterization.  ``budget=0``
    forces every penalized slope to zero at all quantiles.
    """
    if taus is None:
        taus = weights.taus
    taus = validate_taus(taus)
    if taus.shape != weights.taus.shape or not np.allclose(taus, weights.taus):
        raise ValueError("quantile grid does not match the weights' grid")
    if budget < 0:
        raise ValueError("budget must be non-negative")
    penalized, _ = _penalized_mask(design, unpenalized)
    problem = _joint_problem(design, taus, weights=weights.values,
                             budget=float(budget), penalized=penalized)
    return _solve_joint(design, taus, problem,
                        f"budgeted quantile fit (t={budget:g})")


def _ic_parts(fit, design):
    """(sum of log per-quantile losses or -inf, selected count, degenerate?)."""
    losses = pinball_by_quantile(fit, design)
    count = int(fit.selection_mask.sum())
    if np.any(losses <= 0.0):
        return -np.inf, count, True
    return float(np.log(losses).sum()), count, False


def information_criterion(fit, design, criterion="bic"):
    """Model-choice score: summed log pinball losses plus a complexity penalty.

    The penalty counts slope coefficients above :data:`EPS_SELECT` across all
    quantiles (intercepts never count), scaled by ``log(n) / 2n`` for BIC and
    ``2 / 2n`` for AIC.  A perfect fit at any quantile returns ``-inf`` and
    emits :class:`DegenerateFitWarning`.
    """
    if criterion not in ("bic", "aic"):
        raise ValueError(f"criterion must be 'bic' or 'aic', got {criterion!r}")
    loglik, count, degenerate = _ic_parts(fit, design)
    if degenerate:
        warnings.warn("zero pinball loss at some quantile; information "
                      "criterion is -inf", DegenerateFitWarning, stacklevel=2)
        return -np.inf
    n = design.n_obs
    factor = np.log(n) if criterion == "bic" else 2.0
    return loglik + factor / (2.0 * n) * count


@dataclass
class SelectionResult:
    """Budget path with both criteria and the chosen fit.

    ``budgets`` is ascending; ``chosen_index`` minimizes the requested
    criterion with ties resolved toward the smallest budget.
    """

    budgets: np.ndarray
    bic_values: np.ndarray
    aic_values: np.ndarray
    criterion: str
    chosen_index: int
    fit: object

    @property
    def chosen_budget(self):
        return float(self.budgets[self.chosen_index])

    def to_dict(self):
        return {
            "criterion": self.criterion,
            "budgets": [float(t) for t in self.budgets],
            "bic": [float(v) for v in self.bic_values],
            "aic": [float(v) for v in self.aic_values],
            "chosen_index": int(self.chosen_index),
            "chosen_budget": self.chosen_budget,
            "fit": self.fit.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc):
        from .quantreg import QuantileFit

        return cls(budgets=np.array(doc["budgets"], dtype=float),
                   bic_values=np.array(doc["bic"], dtype=float),
                   aic_values=np.array(doc["aic"], dtype=float),
                   criterion=doc["criterion"],
                   chosen_index=int(doc["chosen_index"]),
                   fit=QuantileFit.from_dict(doc["fit"]))


def weighted_l1_norm(fit, weights, penalized):
    """Budget consumption of a fit: sum of w * |slope| over penalized entries."""
    mags = np.abs(fit.betas[:, 1:])
    finite = np.isfinite(weights.values) & penalized[None, :]
    return float((weights.values * mags)[finite].sum())


def default_budget_grid(design, weights, taus=None, n_points=50, t_min=1e-3,
                        unpenalized=None):
    """Log-spaced budget grid from ``t_min`` up to the unpenalized fit's norm.

    The upper endpoint is the weighted l1 norm of the non-crossing fit
    without any budget, i.e. the smallest budget that is certainly slack, so
    the grid spans "everything zeroed" to "nothing restricted".
    """
    if taus is None:
        taus = weights.taus
    penalized, _ = _penalized_mask(design, unpenalized)
    free_fit = fit_ncqr(design, taus)
    upper = weighted_l1_norm(free_fit, weights, penalized)
    upper = max(upper, 10.0 * t_min)
    return np.geomspace(t_min, upper, int(n_points))


def _grid_worker(task):
    design, taus, weights, budget, unpenalized = task
    fit = fit_alasso(design, weights, budget, taus=taus, unpenalized=unpenalized)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateFitWarning)
        loglik, count, _ = _ic_parts(fit, design)
    n = design.n_obs
    bic = loglik + np.log(n) / (2.0 * n) * count
    aic = loglik + 2.0 / (2.0 * n) * count
    return bic, aic, fit


def grid_search(design, weights, budgets, taus=None, criterion="bic",
                unpenalized=None, jobs=1):
    """Fit every budget on the grid and pick the criterion minimizer.

    Budgets are evaluated independently (optionally across ``jobs``
    processes) and aggregated in ascending-budget order, so the result does
    not depend on scheduling; ties go to the smaller budget.
    """
    if criterion not in ("bic", "aic"):
        raise ValueError(f"criterion must be 'bic' or 'aic', got {criterion!r}")
    budgets = np.sort(np.asarray(budgets, dtype=float))
    if budgets.size == 0:
        raise ValueError("budget grid is empty")
    if np.any(budgets < 0):
        raise ValueError("budgets must be non-negative")
    tasks = [(design, taus if taus is None else validate_taus(taus),
              weights, float(t), unpenalized) for t in budgets]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=int(jobs)) as pool:
            results = list(pool.map(_grid_worker, tasks))
    else:
        results = [_grid_worker(t) for t in tasks]
    bic_values = np.array([r[0] for r in results])
    aic_values = np.array([r[1] for r in results])
    scores = bic_values if criterion == "bic" else aic_values
    chosen = int(np.argmin(scores))  # first minimum = smallest budget on ties
    return SelectionResult(budgets=budgets, bic_values=bic_values,
                           aic_values=aic_values, criterion=criterion,
                           chosen_index=chosen, fit=results[chosen][2])
