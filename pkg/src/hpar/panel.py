"""Quarterly panel ingestion, transforms, and design-matrix construction.

The modeling layer works on a small, rigid data contract: a quarterly panel of
float columns on a contiguous date index, growth/difference transforms applied
explicitly by name, and a design matrix whose predictor columns are minimax
scaled to the unit interval (the scaling is what makes the non-crossing
constraints of the quantile estimator valid over the observed domain).
Missing cells are dropped row-wise when a design is built, never imputed.
"""

import csv
import io
import re
from dataclasses import dataclass, field

import numpy as np
import pandas as pd


class PanelFormatError(ValueError):
    """Malformed CSV input: bad header, missing columns, unparseable dates."""


class DateOrderError(ValueError):
    """Dates are not strictly increasing with contiguous quarterly spacing."""


class ScalingError(ValueError):
    """A predictor column cannot be scaled (zero range on the fitting sample)."""


#: transform kind -> lag in quarters
TRANSFORM_LAGS = {
    "QoQ": 1,
    "YoY": 4,
    "Biannual": 8,
    "FirstDiff": 1,
    "Level": 0,
}

#: kinds computed as 100 * log-differences
GROWTH_KINDS = frozenset({"QoQ", "YoY", "Biannual"})

_QUARTER_RE = re.compile(r"^\s*(\d{4})\s*-?\s*[Qq]([1-4])\s*$")


def parse_quarter(text):
    """Parse ``YYYYQn`` / ``YYYY-Qn`` / ISO date strings into a quarterly Period."""
    text = str(text)
    m = _QUARTER_RE.match(text)
    if m:
        return pd.Period(year=int(m.group(1)), quarter=int(m.group(2)), freq="Q")
    try:
        p = pd.Period(text, freq="Q")
    except Exception as exc:
        raise PanelFormatError(f"cannot parse date {text!r} as a quarter") from exc
    if p is pd.NaT:
        raise PanelFormatError(f"cannot parse date {text!r} as a quarter")
    return p


def format_quarter(period):
    """Serialize a quarterly Period as ``YYYYQn``."""
    return f"{period.year}Q{period.quarter}"


@dataclass
class TimeSeriesPanel:
    """Float-valued quarterly panel with a record of applied transforms.

    ``frame`` has a quarterly PeriodIndex and one float64 column per series;
    NaN marks missing.  ``transform_tags`` maps derived column names to the
    transform kind that produced them.
    """

    frame: pd.DataFrame
    transform_tags: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.frame.columns.duplicated().any():
            dupes = sorted(set(self.frame.columns[self.frame.columns.duplicated()]))
            raise PanelFormatError(f"duplicate column names: {dupes}")
        idx = self.frame.index
        if not isinstance(idx, pd.PeriodIndex) or idx.freqstr not in ("Q", "Q-DEC"):
            raise PanelFormatError("panel index must be a quarterly PeriodIndex")
        if len(idx) > 1:
            steps = np.diff(idx.asi8)
            if np.any(steps <= 0):
                raise DateOrderError("dates must be strictly increasing")
            if np.any(steps != 1):
                raise DateOrderError("dates must be contiguous quarters (no gaps)")
        self.frame = self.frame.astype(float)

    @property
    def dates(self):
        return self.frame.index

    @property
    def columns(self):
        return list(self.frame.columns)

    @property
    def n_periods(self):
        return len(self.frame)

    def column(self, name):
        """Return one series as a float array (NaN for missing)."""
        if name not in self.frame.columns:
            raise KeyError(f"no column {name!r} in panel")
        return self.frame[name].to_numpy(dtype=float)

    def date_labels(self):
        return [format_quarter(p) for p in self.frame.index]


def load_panel(csv_source, date_column="date"):
    """Read a CSV into a :class:`TimeSeriesPanel`.

    Accepts a path or an open text handle.  Empty cells and ``NA`` are
    missing; any other cell that fails to parse as a number is also recorded
    as missing.  Dates may be ``YYYYQn``, ``YYYY-Qn``, or ISO dates that fall
    inside a quarter.
    """
    if hasattr(csv_source, "read"):
        text = csv_source.read()
    else:
        with open(csv_source, "r", encoding="utf-8") as fh:
            text = fh.read()
    # peek at the header before pandas mangles duplicate names
    header_line = None
    for line in text.splitlines():
        if line.strip() and not line.lstrip().startswith("#"):
            header_line = line
            break
    if header_line is None:
        raise PanelFormatError("empty CSV: no header row")
    header = next(csv.reader([header_line]))
    header = [h.strip() for h in header]
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise PanelFormatError(f"duplicate column names in header: {dupes}")
    if date_column not in header:
        raise PanelFormatError(f"date column {date_column!r} not found in header {header}")

    df = pd.read_csv(io.StringIO(text), comment="#", skip_blank_lines=True,
                     na_values=["", "NA"], keep_default_na=False, dtype=str)
    df.columns = [c.strip() for c in df.columns]
    dates = pd.PeriodIndex([parse_quarter(v) for v in df[date_column]], freq="Q")
    values = df.drop(columns=[date_column])
    for col in values.columns:
        values[col] = pd.to_numeric(values[col].str.strip() if values[col].dtype == object
                                    else values[col], errors="coerce")
    values.index = dates
    return TimeSeriesPanel(frame=values)


def save_panel(panel, path, date_column="date"):
    """Write a panel back to CSV in the package's exchange format.

    First line is a ``# columns:`` schema comment, dates are ``YYYYQn``,
    missing cells are empty, and floats use their shortest round-trip
    representation so repeated runs produce byte-identical files.
    """
    header = [date_column] + panel.columns
    lines = ["# columns: " + ",".join(header), ",".join(header)]
    values = panel.frame.to_numpy(dtype=float)
    for i, label in enumerate(panel.date_labels()):
        cells = [label]
        for v in values[i]:
            cells.append("" if np.isnan(v) else repr(float(v)))
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def transform(panel, column, kind):
    """Append a transformed copy of ``column`` and return the new panel.

    Growth kinds (``QoQ``, ``YoY``, ``Biannual``) are 100 times the
    log-difference over 1, 4, and 8 quarters; ``FirstDiff`` is the plain
    one-quarter difference and ``Level`` a tagged copy.  The new column is
    named ``<column>_<kind lowercased>`` and its first ``lag`` entries are
    missing.
    """
    if kind not in TRANSFORM_LAGS:
        raise ValueError(
            f"unknown transform kind {kind!r}; expected one of {sorted(TRANSFORM_LAGS)}")
    lag = TRANSFORM_LAGS[kind]
    y = panel.column(column)
    if panel.n_periods <= lag:
        raise ValueError(
            f"column {column!r} has {panel.n_periods} observations, "
            f"too short for a lag-{lag} {kind} transform")
    new_name = f"{column}_{kind.lower()}"
    if new_name in panel.frame.columns:
        raise ValueError(f"transformed column {new_name!r} already exists")
    out = np.full(y.shape, np.nan)
    if kind in GROWTH_KINDS:
        finite = np.isfinite(y)
        if np.any(y[finite] <= 0):
            raise ValueError(
                f"column {column!r} has non-positive values; "
                f"log growth ({kind}) is undefined")
        with np.errstate(invalid="ignore"):
            logged = np.where(finite, np.log(np.where(finite, y, 1.0)), np.nan)
        out[lag:] = 100.0 * (logged[lag:] - logged[:-lag])
    elif kind == "FirstDiff":
        out[lag:] = y[lag:] - y[:-lag]
    else:  # Level
        out[:] = y
    frame = panel.frame.copy()
    frame[new_name] = out
    tags = dict(panel.transform_tags)
    tags[new_name] = kind
    return TimeSeriesPanel(frame=frame, transform_tags=tags)


@dataclass
class ModelSpec:
    """Names one conditional-quantile model: target, regressors, horizon.

    ``unpenalized`` lists regressors exempt from the selection budget (the
    lagged-target term in the reference setup); they must be a subset of
    ``regressors``.  The target itself may appear among the regressors, which
    is how the most recent observed value of the target enters as a
    predictor.
    """

    name: str
    target: str
    regressors: list
    unpenalized: tuple = ()
    horizon: int = 1

    def __post_init__(self):
        self.regressors = list(self.regressors)
        self.unpenalized = tuple(self.unpenalized)
        if not self.regressors:
            raise ValueError(f"model {self.name!r}: regressor list is empty")
        if len(set(self.regressors)) != len(self.regressors):
            raise ValueError(f"model {self.name!r}: duplicate regressors")
        extra = set(self.unpenalized) - set(self.regressors)
        if extra:
            raise ValueError(
                f"model {self.name!r}: unpenalized columns {sorted(extra)} "
                f"are not among the regressors")
        if int(self.horizon) < 1:
            raise ValueError(f"model {self.name!r}: horizon must be >= 1")
        self.horizon = int(self.horizon)


@dataclass
class ScalingParams:
    """Per-column minimax scaling fitted on the estimation sample."""

    columns: list
    minima: np.ndarray
    maxima: np.ndarray

    def __post_init__(self):
        self.minima = np.asarray(self.minima, dtype=float)
        self.maxima = np.asarray(self.maxima, dtype=float)

    @property
    def ranges(self):
        return self.maxima - self.minima

    def scale(self, x):
        """Map raw predictor values onto the fitting sample's unit box."""
        x = np.asarray(x, dtype=float)
        return (x - self.minima) / self.ranges

    def unscale(self, z):
        z = np.asarray(z, dtype=float)
        return z * self.ranges + self.minima

    def to_dict(self):
        return {
            "columns": list(self.columns),
            "minima": [float(v) for v in self.minima],
            "maxima": [float(v) for v in self.maxima],
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(columns=list(doc["columns"]),
                   minima=np.array(doc["minima"], dtype=float),
                   maxima=np.array(doc["maxima"], dtype=float))


@dataclass
class DesignMatrix:
    """Aligned, scaled estimation arrays for one model and horizon.

    ``x`` carries a leading intercept column followed by the scaled
    regressors; ``y`` is the raw (unscaled) response ``target[t + horizon]``
    against predictors measured at ``t``.  ``row_dates`` are the predictor
    dates, ``target_dates`` the corresponding response dates.
    """

    y: np.ndarray
    x: np.ndarray
    columns: list
    row_dates: pd.PeriodIndex
    target_dates: pd.PeriodIndex
    scaling: ScalingParams
    spec: ModelSpec = None

    @property
    def n_obs(self):
        return self.y.size

    @property
    def n_regressors(self):
        return len(self.columns)


def aligned_rows(panel, spec):
    """Horizon-align response and predictors, keeping complete rows only.

    Returns ``(y, x_raw, row_dates, target_dates)`` where row ``t`` pairs the
    target observed ``spec.horizon`` quarters ahead with the raw predictor
    values at ``t``.  Rows with any missing entry are dropped.
    """
    missing = [c for c in [spec.target] + spec.regressors if c not in panel.frame.columns]
    if missing:
        raise KeyError(f"model {spec.name!r}: columns not in panel: {missing}")
    h = spec.horizon
    n = panel.n_periods
    if n <= h:
        raise ValueError(f"panel has {n} periods, too short for horizon {h}")
    target = panel.column(spec.target)
    x_raw = np.column_stack([panel.column(c) for c in spec.regressors])
    y = target[h:]
    x_raw = x_raw[: n - h]
    keep = np.isfinite(y) & np.all(np.isfinite(x_raw), axis=1)
    row_dates = panel.dates[: n - h][keep]
    target_dates = panel.dates[h:][keep]
    return y[keep], x_raw[keep], row_dates, target_dates


def fit_scaling(x_raw, columns):
    """Fit minimax scaling on the given rows; zero-range columns are an error."""
    minima = x_raw.min(axis=0)
    maxima = x_raw.max(axis=0)
    flat = np.flatnonzero(maxima - minima <= 0)
    if flat.size:
        names = [columns[j] for j in flat]
        raise ScalingError(
            f"zero-range column(s) {names} cannot be minimax scaled; "
            f"drop them or extend the sample")
    return ScalingParams(columns=list(columns), minima=minima, maxima=maxima)


def build_design(panel, spec):
    """Assemble the :class:`DesignMatrix` for one model specification.

    Requires at least ``K + 2`` complete rows.  Predictors are scaled with
    minimax parameters fitted on exactly the retained rows, so every
    non-intercept design entry lies in [0, 1].
    """
    y, x_raw, row_dates, target_dates = aligned_rows(panel, spec)
    k = x_raw.shape[1]
    if y.size < k + 2:
        raise ValueError(
            f"model {spec.name!r}: only {y.size} complete rows for "
            f"{k} regressors; need at least {k + 2}")
    scaling = fit_scaling(x_raw, spec.regressors)
    x = np.column_stack([np.ones(y.size), scaling.scale(x_raw)])
    return DesignMatrix(y=y, x=x, columns=list(spec.regressors),
                        row_dates=row_dates, target_dates=target_dates,
                        scaling=scaling, spec=spec)
