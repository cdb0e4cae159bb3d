"""Distributional risk measures built from a fitted quantile vector.

A date's fitted quantiles are summarized by an uncertainty span (80% interval
width), a bounded skewness measure comparing the upper and lower half-spans,
and tail expectations on both sides: the expected shortfall averages the
quantile function over the worst ``alpha`` of outcomes, the expected longrise
over the best ``1 - alpha``.  The quantile function interpolates the grid
points piecewise-linearly and extends both tails with the nearest interior
segment's slope (never negative), which makes the tail expectations available
in closed form.
"""

from dataclasses import dataclass

import numpy as np


def uncertainty(q_low, q_high):
    """Interval width ``q_high - q_low`` (the 80% span on the default grid)."""
    return np.asarray(q_high, dtype=float) - np.asarray(q_low, dtype=float)


def skewness(q_low, q_mid, q_high):
    """Upper-minus-lower half-span asymmetry, scaled into [-1, 1].

    ``((q_high - q_mid) - (q_mid - q_low)) / (q_high - q_low)``; degenerate
    spans (zero width) return 0.  Inputs must be ordered.
    """
    q_low = np.asarray(q_low, dtype=float)
    q_mid = np.asarray(q_mid, dtype=float)
    q_high = np.asarray(q_high, dtype=float)
    span = q_high - q_low
    num = (q_high - q_mid) - (q_mid - q_low)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(span > 0, num / np.where(span > 0, span, 1.0), 0.0)
    return s if s.ndim else float(s)


def decompose(u, s):
    """Split the span into lower and upper contributions.

    Returns ``(left, right)`` with ``left = u (1 - s) / 2`` (the
    median-to-lower-quantile distance) and ``right = u (1 + s) / 2``; the two
    add back to ``u``.
    """
    u = np.asarray(u, dtype=float)
    s = np.asarray(s, dtype=float)
    left = u * (1.0 - s) / 2.0
    right = u * (1.0 + s) / 2.0
    if left.ndim:
        return left, right
    return float(left), float(right)


class QuantileCurve:
    """Piecewise-linear quantile function with clamped linear tails.

    Interpolates the grid knots exactly; below the first and above the last
    knot it continues with the adjacent interior segment's slope, clamped at
    zero so the extension never decreases.  ``integral`` is exact (trapezoid
    on linear pieces), which is what the tail expectations use.
    """

    def __init__(self, taus, values):
        taus = np.asarray(taus, dtype=float)
        values = np.asarray(values, dtype=float)
        if taus.ndim != 1 or taus.size < 2 or taus.shape != values.shape:
            raise ValueError("need matching 1-D knot vectors with at least two knots")
        if np.any(taus <= 0.0) or np.any(taus >= 1.0) or np.any(np.diff(taus) <= 0):
            raise ValueError("knot levels must be strictly increasing inside (0, 1)")
        steps = np.diff(values)
        worst = steps.min() if steps.size else 0.0
        if worst < -1e-8:
            raise ValueError(
                f"quantile values must be non-decreasing (worst step {worst:.3e})")
        # repair sub-tolerance float dips so the curve is exactly monotone
        values = np.maximum.accumulate(values)
        self.taus = taus
        self.values = values
        self.lo_slope = max(0.0, (values[1] - values[0]) / (taus[1] - taus[0]))
        self.hi_slope = max(0.0, (values[-1] - values[-2]) / (taus[-1] - taus[-2]))

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.interp(u, self.taus, self.values)
        out = np.where(u < self.taus[0],
                       self.values[0] + self.lo_slope * (u - self.taus[0]), out)
        out = np.where(u > self.taus[-1],
                       self.values[-1] + self.hi_slope * (u - self.taus[-1]), out)
        return out if out.ndim else float(out)

    def integral(self, a, b):
        """Exact integral of the curve over [a, b] within [0, 1]."""
        if not 0.0 <= a <= b <= 1.0:
            raise ValueError(f"integration limits [{a}, {b}] must satisfy 0 <= a <= b <= 1")
        if a == b:
            return 0.0
        inner = self.taus[(self.taus > a) & (self.taus < b)]
        pts = np.concatenate([[a], inner, [b]])
        vals = self(pts)
        return float(np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(pts)))


def quantile_function(taus, values):
    """Build the :class:`QuantileCurve` through ``(taus, values)`` knots."""
    return QuantileCurve(taus, values)


def expected_shortfall(curve, alpha=0.05):
    """Average of the quantile function over the lower tail (0, alpha]."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly inside (0, 1)")
    return curve.integral(0.0, alpha) / alpha


def expected_longrise(curve, alpha=0.95):
    """Average of the quantile function over the upper tail [alpha, 1)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly inside (0, 1)")
    return curve.integral(alpha, 1.0) / (1.0 - alpha)


@dataclass
class RiskSeries:
    """Per-date risk summary of a fitted quantile surface.

    ``degenerate`` flags dates whose uncertainty span is zero (skewness is
    reported as 0 there and both tail expectations collapse to the median).
    """

    dates: object
    u: np.ndarray
    s: np.ndarray
    left: np.ndarray
    right: np.ndarray
    es: np.ndarray
    el: np.ndarray
    degenerate: np.ndarray
    es_alpha: float = 0.05
    el_alpha: float = 0.95

    def __len__(self):
        return self.u.size


def risk_series(dates, taus, quantile_matrix, es_alpha=0.05, el_alpha=0.95,
                band=(0.1, 0.5, 0.9)):
    """Compute the full :class:`RiskSeries` from a (dates x quantiles) matrix.

    ``band`` names the (low, mid, high) levels used for the span and skewness
    measures; they need not sit on the grid, since all evaluations go through
    the interpolated quantile curve.
    """
    quantile_matrix = np.atleast_2d(np.asarray(quantile_matrix, dtype=float))
    n = quantile_matrix.shape[0]
    if len(dates) != n:
        raise ValueError(f"{len(dates)} dates for {n} quantile rows")
    lo_level, mid_level, hi_level = band
    u = np.empty(n)
    s = np.empty(n)
    left = np.empty(n)
    right = np.empty(n)
    es = np.empty(n)
    el = np.empty(n)
    for i in range(n):
        curve = QuantileCurve(taus, quantile_matrix[i])
        lo, mid, hi = curve(np.array([lo_level, mid_level, hi_level]))
        # build U from the two half-spans so left + right == U holds exactly,
        # and divide by the same U so S stays inside [-1, 1] bitwise
        left[i] = mid - lo
        right[i] = hi - mid
        u[i] = left[i] + right[i]
        s[i] = (right[i] - left[i]) / u[i] if u[i] > 0 else 0.0
        es[i] = expected_shortfall(curve, es_alpha)
        el[i] = expected_longrise(curve, el_alpha)
    return RiskSeries(dates=dates, u=u, s=s, left=left, right=right,
                      es=es, el=el, degenerate=u <= 0,
                      es_alpha=es_alpha, el_alpha=el_alpha)
