"""Independent reference implementations used to cross-check the package.

Everything in this module is deliberately brute-force and shares no code with
``hpar``: LP solutions come from enumerating basic solutions, quantile fits
from exhaustive candidate search, and tail integrals from dense quadrature.
Slow is fine here; these only run on small problems.
"""

import itertools

import numpy as np


def enumerate_lp_vertices(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None,
                          bounds=None, tol=1e-9):
    """Solve a small LP by brute-force enumeration of basic solutions.

    Collects every constraint (inequalities, equalities, finite bounds) as a
    hyperplane, solves all n-subsets that include the equality rows, keeps the
    feasible intersection points, and returns ``(x, objective)`` for the best
    vertex or ``(None, None)`` when no feasible vertex exists.  Only suitable
    for a handful of variables.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    rows = []
    rhs = []
    forced = []  # indices of rows that must be active (equalities)
    if a_eq is not None and len(a_eq):
        for row, b in zip(np.atleast_2d(a_eq), np.atleast_1d(b_eq)):
            forced.append(len(rows))
            rows.append(np.asarray(row, dtype=float))
            rhs.append(float(b))
    if a_ub is not None and len(a_ub):
        for row, b in zip(np.atleast_2d(a_ub), np.atleast_1d(b_ub)):
            rows.append(np.asarray(row, dtype=float))
            rhs.append(float(b))
    if bounds is None:
        bounds = [(0.0, None)] * n
    for j, (lo, hi) in enumerate(bounds):
        e = np.zeros(n)
        e[j] = 1.0
        if lo is not None:
            rows.append(-e)
            rhs.append(-float(lo))
        if hi is not None:
            rows.append(e)
            rhs.append(float(hi))
    rows = np.array(rows)
    rhs = np.array(rhs)
    m = len(rows)

    def feasible(x):
        if a_eq is not None and len(a_eq):
            if np.max(np.abs(np.atleast_2d(a_eq) @ x - np.atleast_1d(b_eq))) > tol:
                return False
        if a_ub is not None and len(a_ub):
            if np.max(np.atleast_2d(a_ub) @ x - np.atleast_1d(b_ub)) > tol:
                return False
        for j, (lo, hi) in enumerate(bounds):
            if lo is not None and x[j] < lo - tol:
                return False
            if hi is not None and x[j] > hi + tol:
                return False
        return True

    free = [i for i in range(m) if i not in forced]
    need = n - len(forced)
    if need < 0:
        return None, None
    best_x, best_obj = None, np.inf
    for extra in itertools.combinations(free, need):
        idx = list(forced) + list(extra)
        a = rows[idx]
        b = rhs[idx]
        try:
            x = np.linalg.solve(a, b)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(x)):
            continue
        if feasible(x):
            obj = float(c @ x)
            if obj < best_obj - 1e-12:
                best_obj, best_x = obj, x
    if best_x is None:
        return None, None
    return best_x, best_obj


def pinball(u, tau):
    u = np.asarray(u, dtype=float)
    return np.where(u >= 0, tau * u, (tau - 1.0) * u)


def empirical_quantile_interval(y, tau):
    """Closed interval of minimizers of the one-sample pinball problem.

    Returns ``(lo, hi)``: every point in the interval attains the minimal
    total pinball loss.  For n*tau not an integer the interval collapses to a
    single order statistic.
    """
    y = np.sort(np.asarray(y, dtype=float))
    n = y.size
    k = n * tau
    if abs(k - round(k)) < 1e-9:
        k = int(round(k))
        lo = y[k - 1]
        hi = y[k] if k < n else y[-1]
        return lo, hi
    k = int(np.ceil(k))
    return y[k - 1], y[k - 1]


def best_line_pinball(x, y, tau):
    """Exhaustive search for the pinball-optimal line with one regressor.

    Considers every line through a pair of sample points plus every flat line
    through a single point (the basic solutions of the QR linear program) and
    returns the minimal total loss.  Only for tiny samples.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.size
    best = np.inf
    for i in range(n):
        # flat line through point i
        loss = pinball(y - y[i], tau).sum()
        best = min(best, loss)
        for j in range(i + 1, n):
            if abs(x[i] - x[j]) < 1e-12:
                continue
            slope = (y[i] - y[j]) / (x[i] - x[j])
            icept = y[i] - slope * x[i]
            loss = pinball(y - (icept + slope * x), tau).sum()
            best = min(best, loss)
    return best


def piecewise_linear_eval(taus, values, u):
    """Evaluate the piecewise-linear quantile curve with straight-line tails.

    Tails extend the nearest interior segment with slope clamped at zero.
    Independent of the package implementation on purpose.
    """
    taus = np.asarray(taus, dtype=float)
    values = np.asarray(values, dtype=float)
    u = np.asarray(u, dtype=float)
    lo_slope = max(0.0, (values[1] - values[0]) / (taus[1] - taus[0]))
    hi_slope = max(0.0, (values[-1] - values[-2]) / (taus[-1] - taus[-2]))
    out = np.interp(u, taus, values)
    below = u < taus[0]
    above = u > taus[-1]
    out = np.where(below, values[0] + lo_slope * (u - taus[0]), out)
    out = np.where(above, values[-1] + hi_slope * (u - taus[-1]), out)
    return out


def tail_mean_quadrature(taus, values, a, b, n_nodes=100_000):
    """Mean of the quantile curve over (a, b) by midpoint quadrature."""
    edges = np.linspace(a, b, n_nodes + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    vals = piecewise_linear_eval(taus, values, mids)
    return float(vals.mean())


def fevd_by_simulation_check(phis, sigma, scale_sigma_jj=True):
    """Generalized FEVD assembled term by term (loops, no vectorisation)."""
    phis = np.asarray(phis, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0]
    theta = np.zeros((n, n))
    for i in range(n):
        denom = 0.0
        for h in range(phis.shape[0]):
            denom += phis[h][i] @ sigma @ phis[h][i]
        for j in range(n):
            num = 0.0
            for h in range(phis.shape[0]):
                num += (phis[h][i] @ sigma[:, j]) ** 2
            if scale_sigma_jj:
                num /= sigma[j, j]
            theta[i, j] = num / denom
    return theta
